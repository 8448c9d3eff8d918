"""How one fixed-size beam is divided across constraint banks.

Bank i holds hypotheses that have met i constraint tokens. The allocator
splits the beam evenly over the C+1 banks (remainder to the topmost); the
adjuster then moves slots away from banks with too few candidates toward the
nearest banks with spares, so the beam is never wasted on unreachable banks.
"""

from lexbeam import adjust_allocation, allocate_banks

print("even split, k=5 over C=4 constraints (banks 0..4):")
print("  ", allocate_banks(5, 4))
print("remainder goes to the most-constrained bank, k=12, C=4:")
print("  ", allocate_banks(12, 4))
print()

print("early in decoding only banks 0 and 1 have candidates;")
print("slots from the empty banks flow back down:")
alloc = allocate_banks(5, 4)
counts = [5, 3, 0, 0, 0]
print(f"   allocation {alloc} + candidate counts {counts}")
print(f"   -> adjusted {adjust_allocation(alloc, counts)}")
print()

print("with more constraints than beam (k=4, C=9), progress still happens;")
print("whatever banks have candidates share the four slots:")
alloc = allocate_banks(4, 9)
counts = [6, 2, 1, 0, 0, 0, 0, 0, 0, 0]
print(f"   allocation {alloc} + candidate counts {counts}")
print(f"   -> adjusted {adjust_allocation(alloc, counts)}")
print()

print("if candidates are scarce everywhere the beam is simply underfilled:")
alloc = allocate_banks(5, 4)
counts = [2, 0, 0, 0, 0]
print(f"   allocation {alloc} + candidate counts {counts}")
print(f"   -> adjusted {adjust_allocation(alloc, counts)} (sum 2)")
