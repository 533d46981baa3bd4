"""Hand evaluation of the extension formulas for the large-shock data (1-based)."""
from fractions import Fraction as F

# pieces: (left value, right value, slope, inf, sup) on (x_{i-1}, x_i)
x = [None, F(1, 4), F(1, 2), F(5, 8)]
pieces = [None,
          (F(3), F(3), F(0)),
          (F(3, 2), F(2), F(2)),
          (F(1, 2), F(5, 8), F(1)),
          (F(0), F(0), F(0))]
N, M = 3, F(2)
jump = [None] + [pieces[k][1] - pieces[k + 1][0] for k in range(1, N + 1)]
dm = [None] + [pieces[k][2] for k in range(1, N + 1)]
dp = [None] + [pieces[k + 1][2] for k in range(1, N + 1)]
xI = {i: x[i] + min(1, jump[i] / (2 * (M + abs(dm[i])))) for i in range(1, N + 1)}
xJ = {i: x[i - 1] - min(1, jump[i - 1] / (2 * (M + abs(dp[i - 1])))) for i in range(2, N + 2)}
lo = lambda i: min(pieces[i][0], pieces[i][1])
hi = lambda i: max(pieces[i][0], pieces[i][1])
for i in range(1, N + 2):
    out = {}
    if i <= N:
        tr = pieces[i][1] + (xI[i] - x[i]) * dm[i]
        U = max(tr, max(hi(q) for q in range(i + 1, N + 2)) + sum(jump[k] for k in range(i, N + 1))
                + sum((xI[k] - x[k]) * abs(dm[k]) for k in range(i + 1, N + 1)))
        out.update(xI=xI[i], U=U, xR=xI[i] + (U - tr) / M)
    if i >= 2:
        tl = pieces[i][0] + (xJ[i] - x[i - 1]) * dp[i - 1]
        last = i if i <= N else N
        Lo = min(tl, min(lo(q) for q in range(1, last + 1)) - sum(jump[k] for k in range(1, i))
                 - sum(abs(xJ[k - 1] - x[k - 2]) * abs(dp[k - 2]) for k in range(3, i + 1)))
        out.update(xJ=xJ[i], Lo=Lo, xL=xJ[i] - (tl - Lo) / M)
    print(i, {k: float(v) for k, v in out.items()})
