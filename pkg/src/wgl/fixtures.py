"""Canonical demo constructions, shared by tests, docs and seed data."""

INCENTER = """\
wgl 1
free A 0.0 0.0
free B 4.0 0.0
free C 0.0 3.0
line ab A B
line bc B C
line ca C A
bisector bisA B A C
bisector bisB A B C
bisector bisC B C A
xll I bisB bisC
foot F I bc
circle incircle I F
"""

# x ll of a line with its own parallel: fails for every placement
PARALLEL_TRAP = """\
wgl 1
free A 0.0 0.0
free B 4.0 0.0
free P 0.0 3.0
line l A B
parallel p P l
xll X l p
"""

# the two lines are parallel at the stored coordinates only
INSTANCE_PARALLEL = """\
wgl 1
free A 0.0 0.0
free B 4.0 0.0
free C 0.0 2.0
free D 4.0 2.0
line l1 A B
line l2 C D
xll X l1 l2
"""

CIRCUMCENTER = """\
wgl 1
free A 0.0 0.0
free B 4.0 0.0
free C 0.0 3.0
perpbis pab A B
perpbis pbc B C
perpbis pca C A
xll O pab pbc
circle circ O A
"""

ORTHOCENTER = """\
wgl 1
free A 0.0 0.0
free B 4.0 0.0
free C 0.0 3.0
line ab A B
line bc B C
line ca C A
perp ha A bc
perp hb B ca
perp hc C ab
xll H ha hb
"""
