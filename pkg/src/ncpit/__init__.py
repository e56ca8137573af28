"""Identity testing for noncommutative arithmetic circuits.

Polynomials over free (noncommuting) variables are zero-tested three
ways: a white-box deterministic pass for circuits whose + gates form
uniform-degree layers, a randomized black-box matrix-substitution test
for sums of products of linear forms, and an exact sparse-expansion
oracle for everything small enough to expand.
"""

from .abp import LayerBasis, ProductAbp, initial_basis, rs_advance, rs_dependencies
from .blackbox import (AutomatonPoint, BlackBox, PitVerdict, Witness,
                       blackbox_sps_test, build_automaton_matrices,
                       dimension_for_degree, lowdeg_bw_test, replay_witness)
from .circuit import (Circuit, CircuitBuilder, Gate, PlusLayering, Rejection,
                      SpsView, check_homogeneous, circuit_degree,
                      classify_plus_regular, classify_sps, constant_fold,
                      evaluate_matrix, first_inhomogeneous_gate, flatten_sum,
                      parse, serialize, syntactic_degrees)
from .errors import (BudgetError, CapacityError, FieldSizeError, NcpitError,
                     ParseError, StructureError)
from .field import (FieldElem, PrimeField, derive_rng, find_prime_above,
                    is_prime, sample)
from .gen import GeneratedCircuit, gen_layered, gen_sum_of_products, generate, ground_truth
from .linforms import (AlphabetBuilder, LinAlphabet, build_alphabet,
                       canonicalize, max_indep_rows)
from .oracle import (NcPoly, ProjPoly, apply_position_map, expand,
                     find_isolating_set, poly_of_forms, project,
                     set_multilinearize)
from .pistar import (IndepResult, PiStarConfig, ScalarClass, SigmaProduct,
                     max_lin_indep, restrict_to_positions, scalar_classes)
from .plus_regular import (LayerFrontier, PlusRegularVerdict, extract_frontier,
                           pit_plus_regular)
from .slp import (Comparison, FingerprintSession, Slp, SlpBuilder, compare,
                  equals, expand as expand_word, leftmost_mismatch, length,
                  letter_at, mismatch_positions_up_to, subword_slp)

__version__ = "0.1.0"
