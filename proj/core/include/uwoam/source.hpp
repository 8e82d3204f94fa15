#pragma once

#include <variant>

#include "uwoam/modes.hpp"

namespace uwoam {

struct PureState {
    int ell = 0;
    int p = 0;
};

/// Attenuated-laser source: optical power plus the OAM state its encoder
/// emits. The interferometric state preparation is collapsed to its
/// output state; the polarization ancilla is already projected out.
struct SourceSpec {
    double power = 0.0;           ///< [W]
    double wavelength = 532e-9;   ///< [m]
    double slot = 1e-9;           ///< time-slot duration [s]
    std::variant<PureState, SuperpositionSpec> state = PureState{};

    void validate() const;
};

struct PhotonBudget {
    double photon_energy = 0.0;  ///< [J]
    double rate = 0.0;           ///< [photons/s]
    double mean_per_slot = 0.0;  ///< photons per time slot
};

/// photon_energy = h c / lambda; rate = power / photon_energy;
/// mean_per_slot = rate * slot.
PhotonBudget photon_budget(const SourceSpec& src);

/// Emitted field: pure states map to lg_field, superpositions to superpose.
ComplexField emit(const SourceSpec& src, const GridSpec& grid, double waist);

}  // namespace uwoam
