"""Free convex semialgebraic geometry at desk scale.

Evaluate matrix-coefficient free polynomials on tuples of symmetric
matrices, locate and compress boundary pairs, assemble separating monic
pencils, and synthesize empirical LMI representations of convex
invertibility sets.
"""

from .ncpoly import NcPolynomial, Word, scalar_poly, word_involution
from .evaluate import (KERNEL, MatrixTuple, MembershipVerdict, Signature,
                       eval_pencil, eval_poly, ray_membership, signature)
from .boundary import (BoundaryPair, SizeConstants, compress_pair,
                       direct_sum_pairs, find_boundary_pair,
                       find_boundary_pairs)
from .vanishing import (VanishingSpace, closure_contains,
                        dominating_pair, is_dominating, vanishing_space)
from .pencil import (MonicPencil, pencil_direct_sum, pencil_membership,
                     quadratic_to_lmi, sets_agree_sampled)
from .convexity import (ConvexityReport, contraction_closure_check,
                        julia_unitary, midpoint_falsifier)
from .separate import (SeparationCertificate, epsilon_bound,
                       separating_pencil, structured_pencil,
                       supporting_functional, trace_state)
from .synth import invertible_survivors, min_degree_witness, synthesize_lmi

__version__ = "0.1.0"
