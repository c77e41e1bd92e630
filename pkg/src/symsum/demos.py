"""Bundled proof scripts.

The five demo scripts are embedded so the `demo` subcommand needs no
filesystem layout; the wider corpus also feeds the parser round-trip
tests.
"""

GOMPF_STIPSICZ = """\
# E(4) summed with the plane along a quadric is weakly deformation
# equivalent to E(3) summed with Y along tori of square -1 and +1.

atom E4 E(4) { Sigma-4: g=0, i=-4, a=2 }
atom E3 E(3) { Sigma-3: g=0, i=-3, a=1, perp F3; F3: g=1, i=0, a=1, perp Sigma-3 }
atom E1 E(1) { F1: g=1, i=0, a=1, perp Sigma-1; Sigma-1: g=0, i=-1, a=1, perp F1 }
atom P CP2 { L1: g=0, i=1, a=1, perp L2; L2: g=0, i=1, a=1, perp L1 }
atom Y Rational(8) { T1: g=1, i=1, a=2 }

lhs sum(E4, Sigma-4, desing(P, L1, L2, label=Q), Q)
rhs sum(desing(E3, Sigma-3, F3, label=T-1), T-1, Y, T1)
target ~

by R9 { at = left, fiber = 1, left_section_area = 1,
        left_section = Sigma-3, left_fiber = F3,
        right_section = Sigma-1, right_fiber = F1,
        carry = Sigma-4 } "unfold E(4) as a fiber sum"
by R2 { at = root, resolve_label = T-1 } "reassociate through the quadric"
by R7 { at = right, mark = T1 } "the plane sum blows down the -1 section"
"""

ASSOC_SYM = """\
# The two groupings of a three-fold sum through a desingularized pair
# agree up to symplectomorphism, certified by the thickening/thinning
# expansion with exact area bookkeeping.

atom E3 E(3) { Sigma-3: g=0, i=-3, a=1, perp F3; F3: g=1, i=0, a=1, perp Sigma-3 }
atom E1 E(1) { F1: g=1, i=0, a=1, perp Sigma-1; Sigma-1: g=0, i=-1, a=1, perp F1 }
atom P CP2 { L1: g=0, i=1, a=1, perp L2; L2: g=0, i=1, a=1, perp L1 }

lhs sum(sum(E3, F3, E1, F1), Sigma-3#Sigma-1, desing(P, L1, L2, label=Q), Q)
rhs sum(desing(E3, Sigma-3, F3, label=T-1), T-1, sum(E1, Sigma-1, P, L1), F1#L2)
target =

by R2 { at = root, resolve_label = T-1, eps = 0+1e }
"""

BLOWUP_TRADE = """\
# A blow-up point trades across a sum: blowing up the -3 sphere before
# summing with the plane along a quadric matches blowing up the quadric
# instead.  Only the deformation class survives; the areas must move.

atom X E(3) { Sigma-3: g=0, i=-3, a=1 }
atom P CP2 { Q: g=0, i=4, a=3/4 }
atom Xd E(3) { Sigma-3: g=0, i=-3, a=1-4e }
atom Pd CP2 { Q: g=0, i=4, a=5/4-3e }

lhs sum(blowup(X, at=Sigma-3, size=1/4, transform=St, exc=E), St, P, Q)
rhs sum(Xd, Sigma-3, blowup(Pd, at=Q, size=1/4+1e, transform=Qt, exc=E), Qt)
target ~

by R4 { at = left, fiber = 0+1e, glue_section = Qt, twin_section = Gm,
        shift1 = Q, by1 = 0-3e } "localize the blow-up into a ruled summand"
by R11 { at = left.right, new_fiber = 0+1e, new_size = 1/4+1e,
         pre = Qpre, shift1 = Q, by1 = 1/2 } "flip which section is blown up"
by regroup { at = root }
by R4 { at = right, shift1 = Sigma-3, by1 = 0-4e } rev "absorb the ruled summand"
"""

RATIONAL_BLOWDOWN = """\
# Summing with the plane along a quadric undoes the blow-up of a -3
# sphere: the rational blow-down of the resulting -4 sphere gives back
# the original manifold.

atom X E(3) { Sigma-3: g=0, i=-3, a=1 }
atom P CP2 { Q: g=0, i=4, a=3/4 }

lhs sum(blowup(X, at=Sigma-3, size=1/4, transform=St, exc=E), St, P, Q)
rhs X
target ~

by R6 { at = root }
"""

EN_INDUCTION = """\
# E(4) unfolds inductively into four copies of E(1) glued along fibers.

atom E4 E(4) { Sigma-4: g=0, i=-4, a=4 }
atom E1a E(1) { F1a: g=1, i=0, a=1, perp Sigma-1a; Sigma-1a: g=0, i=-1, a=1, perp F1a }
atom E1b E(1) { F1b: g=1, i=0, a=1, perp Sigma-1b; Sigma-1b: g=0, i=-1, a=1, perp F1b }
atom E1c E(1) { Sigma-1c: g=0, i=-1, a=1, perp F1c; F1c: g=1, i=0, a=1, perp Sigma-1c;
                F2: g=1, i=0, a=1; F3: g=1, i=0, a=1 }
atom E1d E(1) { F1d: g=1, i=0, a=1, perp Sigma-1d; Sigma-1d: g=0, i=-1, a=1, perp F1d }

lhs E4
rhs sum(sum(sum(E1c, F1c, E1d, F1d, carry=Sigma-2, pair=Sigma-2:F2),
            F2, E1b, F1b, carry=Sigma-3, pair=Sigma-3:F3),
        F3, E1a, F1a, carry=Sigma-4)
target ~

by R9 { at = root, fiber = 1, left_section_area = 3,
        left_section = Sigma-3, left_fiber = F3,
        right_section = Sigma-1a, right_fiber = F1a, carry = Sigma-4 }
by R9 { at = left, fiber = 1, left_section_area = 2,
        left_section = Sigma-2, left_fiber = F2,
        right_section = Sigma-1b, right_fiber = F1b, carry = Sigma-3 }
by R9 { at = left.left, fiber = 1, left_section_area = 1,
        left_section = Sigma-1c, left_fiber = F1c,
        right_section = Sigma-1d, right_fiber = F1d, carry = Sigma-2 }
"""

NEUTRAL_W = """\
# Summing with a matched ruled surface changes nothing up to deformation.

atom E3 E(3) { Sigma-3: g=0, i=-3, a=1, perp F3; F3: g=1, i=0, a=1, perp Sigma-3 }
atom W W(0,3,0+1e) { G-n: g=0, i=-3, a=1-3e; Gn: g=0, i=3, a=1, perp Fw;
                     Fw: g=0, i=0, a=0+1e, perp Gn }

lhs E3
rhs sum(W, Gn, E3, Sigma-3)
target ~

by R4 { at = root, s = Sigma-3, fiber = 0+1e, glue_section = Gn,
        twin_section = G-n, fiber_mark = Fw }
"""

RESOLVE = """\
# A desingularized intersection is the sum with a ruled surface whose
# sections have self-intersection k and 2-k.

atom E3 E(3) { Sigma-3: g=0, i=-3, a=1, perp F3; F3: g=1, i=0, a=1, perp Sigma-3 }
atom W W(0,3,0+1e) { Gk: g=0, i=3, a=1, perp Gk2; Gk2: g=0, i=-1, a=1-2e, perp Gk }

lhs desing(E3, Sigma-3, F3, label=T-1)
rhs sum(W, Gk, E3, Sigma-3, carry=T-1)
target ~

by R3 { at = root, fiber = 0+1e, glue_section = Gk, twin_section = Gk2,
        carry = T-1 }
"""

RESOLVE_REFINED = """\
# The exact form of the resolution: with a doubled fiber and the right
# section areas, the thickened desingularization matches bitwise.

atom E3 E(3) { Sigma-3: g=0, i=-3, a=1, perp F3; F3: g=1, i=0, a=1, perp Sigma-3 }
atom W W(0,3,0+2e) { Gk: g=0, i=3, a=1+4e, perp Gk2; Gk2: g=0, i=-1, a=1, perp Gk }

lhs thicken(desing(E3, Sigma-3, F3, label=ST), ST, 0+1e)
rhs sum(W, Gk, thicken(thin(E3, Sigma-3, 0+1e), F3-, 0+1e), Sigma-3-+, carry=ST+)
target =

by R3r { at = root, eps = 0+1e, glue_section = Gk, twin_section = Gk2 }
"""

SPLIT_W = """\
# A ruled surface with a doubled fiber is the sum of two copies with
# half the fiber, cut between the two disjoint sections.

atom W2 W(0,1,0+2e) { G-1: g=0, i=-1, a=1; G1: g=0, i=1, a=1+2e }
atom Wa W(0,1,0+1e) { G-1: g=0, i=-1, a=1; c1: g=0, i=1, a=1+1e }
atom Wb W(0,1,0+1e) { c2: g=0, i=-1, a=1+1e; G1: g=0, i=1, a=1+2e }

lhs W2
rhs sum(Wa, c1, Wb, c2)
target =

by R10 { at = root, plus = G1, minus = G-1, cut1 = c1, cut2 = c2 }
"""

THICKEN_THIN = """\
# Trading a collar across a gluing: thin one side, thicken the other.
# All carried mark data survives bitwise.

atom A E(3) { Sigma-3: g=0, i=-3, a=1, perp F3; F3: g=1, i=0, a=1, perp Sigma-3 }
atom B E(1) { F1: g=1, i=0, a=1, perp Sigma-1; Sigma-1: g=0, i=-1, a=1, perp F1 }

lhs sum(A, F3, B, F1)
rhs sum(thin(A, F3, 0+1e), F3-, thicken(B, F1, 0+1e), F1+)
target =

by R8 { at = root, eps = 0+1e }
"""

FOURFOLD_CYCLIC = """\
# The 4-fold sum is invariant under cyclic rotation of its summands.

atom X1 Rational(5) { A1: g=1, i=2, a=1, perp B1; B1: g=1, i=-2, a=1, perp A1 }
atom X2 Rational(6) { A2: g=1, i=2, a=1, perp B2; B2: g=1, i=-2, a=1, perp A2 }
atom X3 Rational(7) { A3: g=1, i=2, a=1, perp B3; B3: g=1, i=-2, a=1, perp A3 }
atom X4 Rational(8) { A4: g=1, i=2, a=1, perp B4; B4: g=1, i=-2, a=1, perp A4 }

lhs sum4((X1, A1, B1), (X2, A2, B2), (X3, A3, B3), (X4, A4, B4))
rhs sum4((X2, A2, B2), (X3, A3, B3), (X4, A4, B4), (X1, A1, B1))
target =

by R1 { at = root, rotate = 1 }
"""

DEFORM_RESCALE = """\
# Rescaling the symplectic form is a deformation.

atom E3a E(3) { F3: g=1, i=0, a=2 }
atom E3b E(3) { F3: g=1, i=0, a=1 }

lhs E3a
rhs E3b
target ~

by deform { at = root, rescale = 1/2 }
"""

BLOWUP_TRADE_EQ = """\
# Demanding the blow-up trade at the symplectomorphism level fails: the
# two sums need opposite strict area inequalities.

atom X E(3) { Sigma-3: g=0, i=-3, a=1 }
atom P CP2 { Q: g=0, i=4, a=3/4 }
atom X2 E(3) { Sigma-3: g=0, i=-3, a=1/2 }
atom P2 CP2 { Q: g=0, i=4, a=3/4 }

lhs sum(blowup(X, at=Sigma-3, size=1/4, transform=St, exc=E), St, P, Q)
rhs sum(X2, Sigma-3, blowup(P2, at=Q, size=1/4, transform=Q~, exc=E2), Q~)
target =

by R5 { at = root } rev
"""

DEMOS = {
    "gompf-stipsicz": GOMPF_STIPSICZ,
    "assoc-sym": ASSOC_SYM,
    "blowup-trade": BLOWUP_TRADE,
    "rational-blowdown": RATIONAL_BLOWDOWN,
    "en-induction": EN_INDUCTION,
}

CORPUS = {
    **DEMOS,
    "neutral-w": NEUTRAL_W,
    "resolve": RESOLVE,
    "resolve-refined": RESOLVE_REFINED,
    "split-w": SPLIT_W,
    "thicken-thin": THICKEN_THIN,
    "fourfold-cyclic": FOURFOLD_CYCLIC,
    "deform-rescale": DEFORM_RESCALE,
    "blowup-trade-eq": BLOWUP_TRADE_EQ,
}

# scripts expected to verify at their declared target
VERIFYING = {name: src for name, src in CORPUS.items() if name != "blowup-trade-eq"}
