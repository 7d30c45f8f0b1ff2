"""Extract a call network from a tiny C tree and read it back.

Two procedures in two files: ``f`` calls ``g``.  A header declares both
so the prototypes must not count as definitions.
"""

import tempfile
from pathlib import Path

from pcn import build_pcn, load_graph, save_graph

SOURCES = {
    "main.c": '#include "g.h"\n\nint f(int x)\n{\n\treturn g(x) + 1;\n}\n',
    "g.c": '#include "g.h"\n\nint g(int x)\n{\n\treturn x * 2;\n}\n',
    "g.h": "#ifndef G_H\n#define G_H\nint f(int);\nint g(int);\n#endif\n",
}

with tempfile.TemporaryDirectory() as tmp:
    root = Path(tmp) / "kernel"
    root.mkdir()
    for name, text in SOURCES.items():
        (root / name).write_text(text)

    # ids follow file order, so g (g.c) comes before f (main.c)
    graph, report = build_pcn(root)
    print(f"files scanned:  {report.files_scanned}")
    print(f"procedures:     {report.procedures_found}")
    for (src, dst), mult in sorted(graph.edges.items()):
        print(f"edge:           {graph.names[src]} -> {graph.names[dst]} x{mult}")

    out = Path(tmp) / "toy.pcn"
    save_graph(graph, out)
    print("\nserialised graph:")
    print(out.read_text(), end="")
    assert load_graph(out) == graph
