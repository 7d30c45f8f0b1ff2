"""PageRank and influence-PageRank on the two-node chain f -> g.

With damping a the chain has a closed form: rho_f = 1 / (2 + a) and
rho_g = (1 + a) / (2 + a).  Reversing the links swaps the two.
"""

from pcn import CallGraph, GoogleParams, build_stochastic, influence_pagerank, pagerank

chain = CallGraph(2, ("f", "g"), {(0, 1): 1})

for alpha in (0.5, 0.85, 0.99):
    p = GoogleParams(alpha)
    pop = pagerank(build_stochastic(chain), p)
    inf = influence_pagerank(chain, p)
    closed = (1 / (2 + alpha), (1 + alpha) / (2 + alpha))
    print(f"alpha={alpha:<5} popularity f={pop.rho[0]:.12f} g={pop.rho[1]:.12f}  "
          f"closed form f={closed[0]:.12f}  iterations={pop.iterations_used}")
    print(f"{'':11} influence  f={inf.rho[0]:.12f} g={inf.rho[1]:.12f}")

# g is the most called procedure, f the most calling one
print("\ntop by popularity:", chain.names[pagerank(build_stochastic(chain)).order[0]])
print("top by influence: ", chain.names[influence_pagerank(chain).order[0]])
