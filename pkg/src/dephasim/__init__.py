"""Exact qubit pure dephasing by spin and oscillator baths under pi-pulse control."""

from .bath_spectrum import (
    BathMode,
    DiscretizedBath,
    LorentzianSpectrum,
    SpectrumError,
    ThermalParams,
    correlation_time,
    lorentzian_modes,
    one_over_f_modes,
    tabulated_modes,
)
from .sequences import (
    PulseSequence,
    SequenceError,
    custom_sequence,
    free_sequence,
    periodic_sequence,
    uhrig_sequence,
)
from .spin_bath import (
    DephasingResult,
    coherence_spin_free,
    coherence_spin_pulsed,
    gamma_spin_free,
    gamma_spin_periodic,
    spin_free_decay,
    spin_mode_unitary,
)
from .boson_bath import (
    boson_free_decay,
    coherence_boson_exact,
    filter_boson,
    gamma_boson_free,
    gamma_boson_periodic,
)
from .master_eq import gamma_me_boson, gamma_me_spin_free, gamma_me_spin_periodic, validity_check
from .analysis import crossover_interval, enhancement_ratio, short_time_shape, zeno_map

__version__ = "0.1.0"
