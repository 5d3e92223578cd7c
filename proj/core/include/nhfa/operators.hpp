#pragma once

#include <cstdint>

#include "nhfa/symbols.hpp"

namespace nhfa {

enum class EnsembleFamily { BandLimitedGaussian, SingleMode, Bump, PowerIterates };

std::string family_name(EnsembleFamily f);
EnsembleFamily family_from_name(const std::string& s);

/// Deterministic test-function generator: member k draws from the family
/// families[k mod families.size()] with an RNG stream keyed by (seed, k),
/// so members are reproducible independently of evaluation order.
struct EnsembleConfig {
    int count = 100;
    std::uint64_t seed = 1;
    std::vector<EnsembleFamily> families{EnsembleFamily::BandLimitedGaussian};
    int band_limit = 0;  // 0: half the largest mode index
};

std::vector<GridFunction> make_ensemble(const SystemPtr& sys, const EnsembleConfig& cfg,
                                        const SampledSymbol* power_symbol = nullptr);

/// Af(x) = sum_xi u_xi(x) m(x, xi) fhat(xi), the truncated quantization sum.
GridFunction apply(const SampledSymbol& symbol, const GridFunction& f);

/// L*-multiplier of A*: conj(sigma). Requires an x-independent symbol.
SampledSymbol adjoint_multiplier(const SampledSymbol& sigma);

/// Applies an L*-multiplier through the conjugate transform pair:
/// g -> sum_xi sigma*(xi) ghat_*(xi) v_xi.
GridFunction apply_lstar_multiplier(const SampledSymbol& sigma_star, const GridFunction& g);

enum class TargetNorm { Lq, Bmo };

struct NormEstimate {
    double value = 0.0;
    GridFunction witness;
    int witness_member = -1;  // -1 marks the power-iteration witness
    double witness_num = 0.0, witness_den = 0.0;
    std::vector<double> member_nums, member_dens;  // per ensemble member
};

/// Certified lower bound on ||A||: max over the ensemble of
/// norm(Af, q)/norm(f, p) (bmo_norm(Af)/norm(f, inf) for TargetNorm::Bmo),
/// plus power iteration on A*A when p = q = 2 and the symbol is a
/// multiplier. The returned value is realized by the stored witness.
NormEstimate estimate_norm(const SampledSymbol& symbol, double p, double q,
                           const EnsembleConfig& ensemble, TargetNorm target = TargetNorm::Lq);

}  // namespace nhfa
