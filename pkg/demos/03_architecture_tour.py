"""How the layer stack reacts to window size, band count, and class count.

The four conv kernels are fixed (8x3x3x7, 16x3x3x5, 32x3x3x3, 64x3x3x3);
each valid convolution shrinks every axis by kernel-1.  The reference
configuration (window 11, 20 bands, 6 classes) lands on 994,166 trainable
parameters.
"""

from hsi3dcnn import net
from hsi3dcnn.errors import ArchitectureError

print(net.summary_text(net.build_model(11, 20, 6)))

# window size only changes the flatten width (and so dense_1)
print("\nwindow ->  flatten  total parameters")
for s in (9, 11, 13, 15, 17, 19, 21, 25):
    model = net.build_model(s, 20, 6)
    flat = next(r[1][0] for r in model.summary_rows if r[0].startswith("Flatten"))
    print(f"{s:6d} -> {flat:8d}  {model.param_count():12,d}")

# class count only changes the last dense layer: 128*c + c parameters
for c in (6, 9, 16):
    model = net.build_model(11, 20, c)
    print(f"classes {c:2d}: head {model.summary_rows[-1][2]:5d} params, "
          f"total {model.param_count():,d}")

# too small a window underflows the fourth conv
try:
    net.build_model(7, 20, 6)
except ArchitectureError as e:
    print(f"\nwindow 7 fails as expected: {e}")

# small band counts clamp the spectral kernel depths instead of failing,
# so a heavily reduced cube still trains
model = net.build_model(11, 10, 4)
depths = [layer.w.shape[-1] for layer in model.layers if isinstance(layer, net.Conv3D)]
print(f"10 bands -> spectral kernel depths {depths}, total {model.param_count():,d}")
