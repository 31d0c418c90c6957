"""The evaluation metrics, worked by hand on a small confusion matrix.

Rows are ground truth, columns are predictions.  The 2x2 case below is the
classic one: OA 0.70, AA 0.70, kappa exactly 0.40.
"""

import numpy as np

from hsi3dcnn import metrics

counts = np.array([[40, 10],
                   [20, 30]], dtype=np.int64)
cm = metrics.ConfusionMatrix(counts=counts)

total = counts.sum()
p_o = np.trace(counts) / total                       # observed agreement
rows, cols = counts.sum(axis=1), counts.sum(axis=0)
p_e = float(rows @ cols) / total**2                  # chance agreement
print(f"observed agreement p_o = {p_o}, chance agreement p_e = {p_e}")
print(f"kappa by hand = (p_o - p_e)/(1 - p_e) = {(p_o - p_e) / (1 - p_e)}")
print(f"kappa (module, exact integer form) = {metrics.kappa(cm)}")

print(f"\nOA = {metrics.overall_accuracy(cm)}")
aa, _ = metrics.average_accuracy(cm)
print(f"AA = mean of per-class recalls = mean(40/50, 30/50) = {aa}")

per_class, macro = metrics.per_class_prf(cm)
for k, (p, r, f1, _) in enumerate(per_class, start=1):
    print(f"class {k}: precision {p:.4f}  recall {r:.4f}  f1 {f1:.4f}")
print(f"macro f1 = {macro['f1']:.4f}")

# kappa corrects for chance: a matrix with the same OA but lopsided marginals
lopsided = metrics.ConfusionMatrix(counts=np.array([[70, 30], [0, 0]], dtype=np.int64))
print(f"\nsame OA ({metrics.overall_accuracy(lopsided)}), all-one-class truth:"
      f" kappa drops to {metrics.kappa(lopsided)}")

# accumulation from prediction streams, and merging across batches
a = metrics.accumulate([0, 0, 1, 1], [0, 1, 1, 1], c=2)
b = metrics.accumulate([1, 0], [1, 0], c=2)
print(f"\nmerged counts:\n{metrics.merge(a, b).counts}")
print("\nfull report format:")
print(metrics.report_text(cm, header_lines=["demo=true"]))
