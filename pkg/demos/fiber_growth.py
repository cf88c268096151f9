"""
Fiber counts and the three verdicts
===================================

Scans normalised fiber counts g and h for a few maps to the line and reads
off the FRS, E-smooth and jet-flat verdicts.  Everything is exact: each
table row stores integer counts and the fractions built from them.
"""
from jetcount.diagnostics import ScanSpec, esmooth_diagnostic, frs_diagnostic, jetflat_diagnostic, scan_gh
from jetcount.schemes import PolyMorphism, affine_space


def to_line(name, variables, expr):
    return PolyMorphism(name, affine_space(variables), affine_space("t"), (expr,))


# x -> x^2: the fiber over 0 grows like 3^(k - ceil(k/2)) mod 3^k.
square = to_line("square", "x", "x^2")
table = scan_gh(ScanSpec(square, (3, 5), 6, cap=1))
print("g(0,k) for x^2 at p=3:", [str(table.get(3, k, (0,)).g) for k in range(1, 7)])

# Three and four squares have bounded g; h shrinks with p.
sq3 = to_line("q3", "xyz", "x^2 + y^2 + z^2")
sq4 = to_line("q4", "xyzw", "x^2 + y^2 + z^2 + w^2")
tables = {
    "square": table,
    "q3": scan_gh(ScanSpec(sq3, (3, 5), 3, cap=125)),
    "q4": scan_gh(ScanSpec(sq4, (3, 5), 3, cap=125)),
}
for name, t in tables.items():
    frs = frs_diagnostic(t)
    es = esmooth_diagnostic(t)
    jf = jetflat_diagnostic(t, 1, frs)
    print(f"{name:6s} FRS {frs.outcome:12s} C1={frs.constants['C1']}  C2={frs.constants['C2']}")
    print(f"{'':6s} E-smooth {es.outcome:12s} E={es.fitted}  {' '.join(es.notes)}")
    print(f"{'':6s} jet-flat {jf.outcome:12s} epsilon={jf.fitted}")

# The first rows of a table as they are exported.
print(tables["q3"].to_csv().splitlines()[:6])
