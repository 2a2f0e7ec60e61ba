"""
Format help for the --help-formats flag.
Prints the grammar of every input file the CLI reads.
"""

from typing import Optional

from rich.console import Console
from rich.panel import Panel

FORMATS = {
    "sequence": """\
a1.a2.a3          finite word (letters joined by '.')
a1.a2|(a3.a1)     eventually periodic: pre = a1 a2, period = a3 a1
(a2)              periodic
~                 the empty sequence
<e.f>             a block letter of a higher block alphabet""",
    "graph": """\
graph <name>
vertex <id>
edge <id> <src> <dst>
emitter-infinite <vertex> fan [prefix]   edges <prefix>n: v -> v_n, <prefix>nr: v_n -> v (default h)
emitter-infinite <vertex> ray [prefix]   edges <prefix>n: v_(n-1) -> v_n, v_0 = v (default e)""",
    "presentation": """\
shift forbidden finite:<N> | infinite | letters <letter> ...
block <word>
shift edges <graph-file>
shift builtin full | hub_pairs | ladder | ray | ex5_18_pairs | ex5_17_ray
On the command line a shift is edges:<graph-file>, builtin:<name> or a presentation file.""",
    "blockmap": """\
blockmap <name> window <M>
map <word> <letter>
default project <k> | default higher-block | default first-letter
Unbounded codes omit the window and use one section per symbol:
family <symbol> window <n>""",
    "element": """\
<coefficient> * <alpha> ; <beta>     one term per line, coefficient a rational such as -1/2
paths are dot-joined edge ids, or @<vertex> for a vertex""",
}


def show_format_help(console: Optional[Console] = None) -> None:
    console = console or Console()
    for name, grammar in FORMATS.items():
        console.print(Panel(grammar, title=f"[bold cyan]{name}[/]", border_style="bright_blue", expand=False))
