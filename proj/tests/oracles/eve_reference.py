#!/usr/bin/env python3
"""Reference recurrences for Adam and Eve, written directly from the
algorithm statement in plain Python floats (IEEE double). Used offline to
freeze golden values in the C++ tests; never imported by the build.

Usage: python3 eve_reference.py
"""

import math


def adam_run(diag, theta0, lr, steps, b1=0.9, b2=0.999, eps=1e-8):
    theta = list(theta0)
    m = [0.0] * len(theta)
    v = [0.0] * len(theta)
    rows = []
    for t in range(1, steps + 1):
        g = [a * x for a, x in zip(diag, theta)]
        f = sum(0.5 * a * x * x for a, x in zip(diag, theta))
        c1 = 1.0 - b1 ** float(t)
        c2 = 1.0 - b2 ** float(t)
        for i in range(len(theta)):
            m[i] = b1 * m[i] + (1.0 - b1) * g[i]
            v[i] = b2 * v[i] + (1.0 - b2) * (g[i] * g[i])
            theta[i] = theta[i] - lr * (m[i] / c1) / (math.sqrt(v[i] / c2) + eps)
        rows.append((t, f, lr, list(theta)))
    final = sum(0.5 * a * x * x for a, x in zip(diag, theta))
    return rows, final


def eve_run(diag, theta0, lr, steps, b1=0.9, b2=0.999, b3=0.999, c=10.0, eps=1e-8, fstar=0.0):
    theta = list(theta0)
    m = [0.0] * len(theta)
    v = [0.0] * len(theta)
    d_tilde = 1.0
    f_prev = None
    rows = []
    for t in range(1, steps + 1):
        g = [a * x for a, x in zip(diag, theta)]
        f = sum(0.5 * a * x * x for a, x in zip(diag, theta))
        d = None
        if t > 1:
            den = min(f, f_prev) - fstar
            d = c * c if den <= 1e-12 else abs(f - f_prev) / den
            d_hat = min(max(d, 1.0 / c), c)
            d_tilde = min(max(b3 * d_tilde + (1.0 - b3) * d_hat, 1.0 / c), c)
            alpha = min(max(lr / d_tilde, lr / c), c * lr)
        else:
            d_tilde = 1.0
            alpha = lr
        c1 = 1.0 - b1 ** float(t)
        c2 = 1.0 - b2 ** float(t)
        for i in range(len(theta)):
            m[i] = b1 * m[i] + (1.0 - b1) * g[i]
            v[i] = b2 * v[i] + (1.0 - b2) * (g[i] * g[i])
            theta[i] = theta[i] - alpha * (m[i] / c1) / (math.sqrt(v[i] / c2) + eps)
        f_prev = f
        rows.append((t, f, d, d_tilde, alpha, list(theta)))
    final = sum(0.5 * a * x * x for a, x in zip(diag, theta))
    return rows, final


def nesterov_rosenbrock(lr, steps, mu=0.9):
    x, y = -1.2, 1.0
    vx = vy = 0.0
    for t in range(1, steps + 1):
        a = 1.0 - x
        b = y - x * x
        f = a * a + 100.0 * b * b
        if not math.isfinite(f):
            return t, f
        gx = -2.0 * a - 400.0 * x * b
        gy = 200.0 * b
        if not (math.isfinite(gx) and math.isfinite(gy)):
            return t, f
        vx = mu * vx - lr * gx
        vy = mu * vy - lr * gy
        x = x - lr * gx + mu * vx
        y = y - lr * gy + mu * vy
    return None, None


GRID = [1e-6, 5e-6, 1e-5, 5e-5, 1e-4, 5e-4, 1e-3, 5e-3, 1e-2, 5e-2, 1e-1]


def main():
    print("== Adam golden, quadratic A=I, theta0=[1,1], lr=1e-3, 1000 steps")
    rows, final = adam_run([1.0, 1.0], [1.0, 1.0], 1e-3, 1000)
    for t in (1, 2, 10, 1000):
        print(t, repr(rows[t - 1][1]), [repr(x) for x in rows[t - 1][3]])
    print("final", repr(final))

    print("== Eve golden, quadratic A=diag(1,100), theta0=[1,1], lr=1e-3, 500 steps")
    rows, final = eve_run([1.0, 100.0], [1.0, 1.0], 1e-3, 500)
    for t in (1, 2, 3, 50, 500):
        r = rows[t - 1]
        print(t, "f", repr(r[1]), "d", repr(r[2]), "dt", repr(r[3]), "a", repr(r[4]),
              [repr(x) for x in r[5]])
    print("final", repr(final))

    steps = 2000
    print(f"== convergence, diag(1,100), theta0=[1,1], {steps} steps, 11-point grid")
    for name, fn in (("adam", adam_run), ("eve", eve_run)):
        finals = [(fn([1.0, 100.0], [1.0, 1.0], lr, steps)[1], lr) for lr in GRID]
        finals.sort()
        print(name, "best lr", finals[0][1], "final", repr(finals[0][0]))
        for f, lr in finals:
            print("   ", lr, repr(f))

    print("== nesterov on rosenbrock")
    for lr in (1e-3, 1e-2, 1e-1, 1.0):
        print(lr, nesterov_rosenbrock(lr, 1000))


if __name__ == "__main__":
    main()
