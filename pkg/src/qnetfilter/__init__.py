"""Hidden non-n-locality in linear networks of filtered two-qubit links."""

from .core import (
    BlochForm,
    NotHermitian,
    NotPositive,
    NotUnitTrace,
    bloch_decompose,
    canonical_frame,
    correlation_singular_values,
    from_bloch,
    kron,
    matrix_from_pairs,
    matrix_to_pairs,
    rotation_to_unitary,
    validate_density,
)
from .states import grud_state, pure_theta_state, product_state, werner_state, x_state
from .filtering import (
    FilterAnnihilatesState,
    FilteredLink,
    LinkFilter,
    NetworkFilterSpec,
    apply_link_filter,
    assign_network_filters,
    filter_network,
    filter_operator,
    filtered_bell_diagonal,
)
from .channels import (
    KrausChannel,
    amplitude_damping,
    apply_channel,
    apply_channel_both_qubits,
    bit_flip,
)
from .nlocal import (
    ConjectureReport,
    DimensionTooLarge,
    EvalResult,
    MeasurementSettings,
    NetworkSpec,
    OracleResult,
    b_lin,
    b_seq,
    born_distribution,
    born_oracle,
    conjecture_search,
    evaluate,
    lhs_at_settings,
    maximize_lhs,
)
from .config import (
    ConfigError,
    ScanAxis,
    build_network,
    build_settings,
    build_states,
    get_path,
    load_config,
    scan_axes,
    set_path,
)

__version__ = "0.1.0"

__all__ = [
    "BlochForm",
    "NotHermitian",
    "NotPositive",
    "NotUnitTrace",
    "bloch_decompose",
    "canonical_frame",
    "correlation_singular_values",
    "from_bloch",
    "kron",
    "matrix_from_pairs",
    "matrix_to_pairs",
    "rotation_to_unitary",
    "validate_density",
    "grud_state",
    "pure_theta_state",
    "product_state",
    "werner_state",
    "x_state",
    "FilterAnnihilatesState",
    "FilteredLink",
    "LinkFilter",
    "NetworkFilterSpec",
    "apply_link_filter",
    "assign_network_filters",
    "filter_network",
    "filter_operator",
    "filtered_bell_diagonal",
    "KrausChannel",
    "amplitude_damping",
    "apply_channel",
    "apply_channel_both_qubits",
    "bit_flip",
    "ConjectureReport",
    "DimensionTooLarge",
    "EvalResult",
    "MeasurementSettings",
    "NetworkSpec",
    "OracleResult",
    "b_lin",
    "b_seq",
    "born_distribution",
    "born_oracle",
    "conjecture_search",
    "evaluate",
    "lhs_at_settings",
    "maximize_lhs",
    "ConfigError",
    "ScanAxis",
    "build_network",
    "build_settings",
    "build_states",
    "get_path",
    "load_config",
    "scan_axes",
    "set_path",
]
