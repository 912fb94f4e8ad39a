"""
Jump rules of the two-sided model
=================================

Each particle carries an exponential clock of rate 1.  When it rings the
particle goes right with probability ``p`` and left with probability
``q = 1 - p``.  Right moves can cascade through a block of particles;
left moves either step onto an empty site, swap with a smaller label, or
are blocked.
"""

from masep.model import apply_left_jump, apply_right_jump, enumerate_transitions, state

# A block of three particles at sites 0, 1, 2 carrying species 1, 2, 3.
s = state([0, 1, 2], [1, 2, 3])
print("start              ", s)

# The species-1 particle jumps right.  It cannot displace anything larger,
# so it skips past the block and lands on the first empty site.
print("right jump of #1   ", apply_right_jump(s, 1))

# Reverse the labels and the leftmost particle outranks the rest: it takes
# site 1, the displaced 2 takes site 2, and the displaced 1 lands on 3.
r = state([0, 1, 2], [3, 2, 1])
print("right jump of #1   ", apply_right_jump(r, 1), " (from", r, ")")

# Left moves follow the multi-species TASEP rule.
pair = state([0, 1], [1, 2])
print("left jump of #2    ", apply_left_jump(pair, 2), " (swap with smaller label)")
print("left jump blocked  ", apply_left_jump(state([0, 1], [2, 1]), 2))

###############################################################################
# Every outgoing transition with its rate.  The total exit rate lies between
# ``N p`` (every left move blocked) and ``N``.
for tr in enumerate_transitions(pair, 0.7):
    print(f"  -> {tr.target}   rate {tr.rate:.2f}")
