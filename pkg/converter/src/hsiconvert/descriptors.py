"""What each supported benchmark scene is expected to look like.

Only the "corrected" MATLAB distributions are accepted (water-absorption
bands already removed); raw variants are rejected with a pointer to the
corrected file, which removes any ambiguity about dropped band indices.
"""

from dataclasses import dataclass


@dataclass(frozen=True)
class DatasetDescriptor:
    name: str
    cube_key: str            # MATLAB variable holding the reflectance cube
    gt_key: str              # MATLAB variable holding the label grid
    spatial: tuple | None    # expected (rows, cols); None = trust the file
    bands: int | None        # expected retained band count; None = trust the file
    raw_band_counts: tuple   # band counts that identify a raw (uncorrected) cube
    water_note: str


DATASETS = {
    "indian-pines": DatasetDescriptor(
        name="indian-pines",
        cube_key="indian_pines_corrected",
        gt_key="indian_pines_gt",
        spatial=(145, 145),
        bands=200,
        raw_band_counts=(220, 224),
        water_note="corrected variant drops the water-absorption bands, 224 -> 200",
    ),
    "salinas": DatasetDescriptor(
        name="salinas",
        cube_key="salinas_corrected",
        gt_key="salinas_gt",
        spatial=(512, 217),
        bands=204,
        raw_band_counts=(224,),
        water_note="corrected variant drops bands 108-112, 154-167 and 224, 224 -> 204",
    ),
    "salinas-a": DatasetDescriptor(
        name="salinas-a",
        cube_key="salinasA_corrected",
        gt_key="salinasA_gt",
        spatial=None,  # sub-scene; trust the file header
        bands=204,
        raw_band_counts=(224,),
        water_note="same band removal as the full Salinas scene",
    ),
    "pavia-university": DatasetDescriptor(
        name="pavia-university",
        cube_key="paviaU",
        gt_key="paviaU_gt",
        spatial=None,  # distributed extent differs from some published figures
        bands=None,
        raw_band_counts=(115,),
        water_note="distribution already excludes the 12 noisy bands (103 kept)",
    ),
}
