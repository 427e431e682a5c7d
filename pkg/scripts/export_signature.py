"""Write the signature step function of a fixture Seifert matrix, or of a cable
expression in it, as two-column text for plotting.

    python3 scripts/export_signature.py trefoil out.txt ["3*i(2)[A] + i(1)[A] + 3*[A]"]
"""
import sys

from bingcalc import algc
from bingcalc.cli import MATRICES


def main(argv):
    if len(argv) not in (2, 3):
        print(__doc__)
        return 2
    a = MATRICES[argv[0]]
    sf = algc.eval_expression(argv[2], {"A": a}).function if len(argv) == 3 else algc.signature_function(a)
    with open(argv[1], "w") as fh:
        fh.write(sf.export_text())
    return 0


if __name__ == "__main__":
    sys.exit(main(sys.argv[1:]))
