"""kronzeta: exact-arithmetic verification of the Kronecker-embedding
double-coset geometry, the unramified local zeta identities, and the
real-place Gram-Schmidt factorization."""

from .arch import (
    IwasawaFactors,
    PhiSequence,
    SectionExponents,
    gram_schmidt_explicit,
    iwasawa_numeric,
    phi_sequence,
    section_value_exponents,
)
from .cosets import (
    DoubleCosetClass,
    OrbitTable,
    StabilizerDescription,
    classify_double_coset,
    coset_label,
    enumerate_orbits,
    stabilizer_bruteforce,
    stabilizer_predicted,
    verify_orbit_lemma,
    verify_tensor_inv_lemma,
)
from .errors import KronzetaError
from .matgroup import (
    ExactMatrix,
    ParabolicShape,
    StarContext,
    ValuationContext,
    epsilon_rep,
    kronecker,
    modulus_character,
    unipotent_rep,
    verify_modulus_compatibility,
    weyl_rep,
)
from .padic import (
    CartanForm,
    DominantCochar,
    cartan_decompose,
    enumerate_dominant,
    macdonald_measure,
)
from .rings import (
    QQ,
    LaurentPoly,
    PrimeField,
    PrimeFieldElem,
    QRoot,
    QRootRing,
    RationalFunction,
    TruncatedSeries,
)
from .zeta import (
    CentralCharValue,
    SatakeParams,
    center_factor,
    l_factor,
    local_integral_torus_sum,
    section_value_on_torus,
    spherical_coeff,
    verify_gj_identity,
    verify_local_identity,
    zeta_gj_torus_sum,
)

__version__ = "0.1.0"
