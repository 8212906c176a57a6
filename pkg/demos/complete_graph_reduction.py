"""Shrinking complete graphs without losing their spectrum."""
from isospec import charfun, reduce, sigma
from isospec.graph import WeightedDigraph
from isospec.weights import format_weight

K4 = WeightedDigraph.from_matrix([[1] * 4 for _ in range(4)])
print("sigma(K4):", sigma(K4).as_list())

# keep three vertices; the dropped one folds into every remaining entry
R = reduce(K4, [0, 1, 2])
for row in R.weights:
    print("  ", [format_weight(w) for w in row])

print("charfun(K4) =", format_weight(charfun(K4)))
print("charfun(R)  =", format_weight(charfun(R)))
print("sigma(R):", sigma(R).as_list())

# the factor l-1 in the denominator is the removed vertex's own characteristic factor
for n in range(2, 7):
    K = WeightedDigraph.from_matrix([[1] * n for _ in range(n)])
    same = sigma(reduce(K, range(n - 1))).as_list() == sigma(K).as_list()
    print(f"K{n}: reduction keeps the spectrum -> {same}")
