#include "uwoam/source.hpp"

namespace uwoam {

namespace {
constexpr double kPlanck = 6.62607015e-34;      // J s
constexpr double kLightSpeed = 299792458.0;     // m/s
}

void SourceSpec::validate() const {
    if (!(power >= 0.0)) throw std::invalid_argument("SourceSpec: power must be >= 0");
    if (!(wavelength > 0.0)) throw std::invalid_argument("SourceSpec: wavelength must be positive");
    if (!(slot > 0.0)) throw std::invalid_argument("SourceSpec: slot must be positive");
    if (const auto* s = std::get_if<SuperpositionSpec>(&state)) s->validate();
}

PhotonBudget photon_budget(const SourceSpec& src) {
    src.validate();
    PhotonBudget b;
    b.photon_energy = kPlanck * kLightSpeed / src.wavelength;
    b.rate = src.power / b.photon_energy;
    b.mean_per_slot = b.rate * src.slot;
    return b;
}

ComplexField emit(const SourceSpec& src, const GridSpec& grid, double waist) {
    src.validate();
    if (const auto* pure = std::get_if<PureState>(&src.state)) {
        LGModeSpec mode{pure->ell, pure->p, waist, src.wavelength};
        return lg_field(mode, grid);
    }
    const auto& sup = std::get<SuperpositionSpec>(src.state);
    return superpose(sup, grid, waist, src.wavelength);
}

}  // namespace uwoam
