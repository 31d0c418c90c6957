"""Finite-difference audit of the hand-derived backpropagation.

Every layer's backward pass is closed-form; central differences on the loss
give an independent check.  Run in float64 (32-bit noise swamps h^2 error).
"""

import numpy as np

from hsi3dcnn import net

model = net.build_model(s=9, b=8, c=3, seed=1, dtype=np.float64)
rng = np.random.default_rng(1)
x = rng.standard_normal((3, 1, 9, 9, 8))
y = np.array([0, 1, 2])


def total_loss():
    losses, _ = net.softmax_loss_batch(model.forward(x, train=False), y)
    return float(losses.sum())


# analytic gradients: one forward + one backward
logits = model.forward(x, train=False)
_, grad = net.softmax_loss_batch(logits, y)
model.zero_grads()
model.backward(grad * len(y))

print(f"{'tensor':<22} {'checked':>8} {'max rel err':>12}")
for name, p, g in model.parameters():
    flat, flat_g = p.ravel(), g.ravel()
    idxs = rng.choice(p.size, size=min(20, p.size), replace=False)
    worst = 0.0
    for i in idxs:
        old = flat[i]
        h = 1e-5 * max(1.0, abs(old))
        flat[i] = old + h
        fp = total_loss()
        flat[i] = old - h
        fm = total_loss()
        flat[i] = old
        num = (fp - fm) / (2 * h)
        a = flat_g[i]
        if num != a:
            worst = max(worst, abs(num - a) / max(abs(num), abs(a), 1e-8))
    print(f"{name:<22} {len(idxs):>8} {worst:>12.2e}")

print("\nanything above ~1e-6 would indicate a broken backward pass.")
