"""Branch expansions, and reductions that never leave the integers."""
from isospec import branch_expand, charfun, l_construct, reduce, sigma
from isospec.graph import graph_build
from isospec.spectrum import nonzero_part
from isospec.weights import format_weight

H = graph_build(["v1", "v2", "v3", "v4"], [
    ("v1", "v2", 1), ("v2", "v1", 1), ("v2", "v3", 1), ("v2", "v2", 1),
    ("v3", "v4", 1), ("v4", "v1", 1), ("v4", "v3", 1), ("v3", "v3", 1)])

print("sigma(H):", [(round(z.real, 6), m) for z, m in sigma(H)])
R = reduce(H, ["v1", "v3"])
print("reduction over v1, v3:")
for row in R.weights:
    print("  ", [format_weight(w) for w in row])

X, corr = branch_expand(H, ["v1", "v3"])
print(f"\nexpansion has {X.n} vertices:", X.labels)
print("sigma(X):", [(round(z.real, 6), m) for z, m in sigma(X)])
print("reduces back to the same graph:", reduce(X, [0, 1]).same_matrix(R))

# integer weights, zero loops outside S
G = graph_build(["a", "b", "c", "d", "e", "f"], [
    ("a", "c", 2), ("c", "d", 1), ("d", "b", 3), ("a", "e", 1), ("e", "b", 2),
    ("b", "f", 1), ("f", "b", 1), ("f", "a", 2), ("b", "a", 1), ("a", "a", 1)])
L = l_construct(G, ["a", "b"])
print(f"\nL-construction: {G.n} -> {L.n} vertices")
for i, j, w in L.edges():
    print(f"   {L.labels[i]} -> {L.labels[j]}: {format_weight(w)}")
print("nonzero spectrum kept:", nonzero_part(charfun(L).num) == nonzero_part(charfun(G).num))
