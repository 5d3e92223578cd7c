#include "nhfa/operators.hpp"

#include <algorithm>
#include <cmath>

#include "nhfa/parallel.hpp"

namespace nhfa {

std::string family_name(EnsembleFamily f) {
    switch (f) {
        case EnsembleFamily::BandLimitedGaussian: return "band_limited_gaussian";
        case EnsembleFamily::SingleMode: return "single_mode";
        case EnsembleFamily::Bump: return "bump";
        case EnsembleFamily::PowerIterates: return "power_iterates";
    }
    return {};
}

EnsembleFamily family_from_name(const std::string& s) {
    if (s == "band_limited_gaussian") return EnsembleFamily::BandLimitedGaussian;
    if (s == "single_mode") return EnsembleFamily::SingleMode;
    if (s == "bump") return EnsembleFamily::Bump;
    if (s == "power_iterates") return EnsembleFamily::PowerIterates;
    throw std::invalid_argument("unknown ensemble family '" + s + "'");
}

namespace {

// splitmix64 + Box-Muller: stdlib distributions are implementation-defined,
// these streams are stable across toolchains.
struct Rng {
    std::uint64_t state;
    bool have_cache = false;
    double cache = 0.0;

    explicit Rng(std::uint64_t seed) : state(seed) {}

    std::uint64_t next() {
        state += 0x9E3779B97F4A7C15ull;
        std::uint64_t z = state;
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }

    double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }  // [0,1)

    double gauss() {
        if (have_cache) {
            have_cache = false;
            return cache;
        }
        const double u1 = 1.0 - uniform();  // (0,1]
        const double u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        cache = r * std::sin(2.0 * pi * u2);
        have_cache = true;
        return r * std::cos(2.0 * pi * u2);
    }
};

std::uint64_t member_seed(std::uint64_t seed, int k) {
    return seed * 0x2545F4914F6CDD1Dull + 0x9E3779B97F4A7C15ull * static_cast<std::uint64_t>(k + 1);
}

GridFunction band_limited_member(const SystemPtr& sys, Rng& rng, int band_limit) {
    CVec a = CVec::Zero(sys->modes());
    for (int k = 0; k < sys->modes(); ++k) {
        // Draw for every mode to keep streams aligned across band limits.
        const double re = rng.gauss(), im = rng.gauss();
        if (std::abs(sys->indices[k]) <= band_limit) a[k] = Complex(re, im);
    }
    return inverse(CoefficientVector{sys, std::move(a), Variant::L});
}

}  // namespace

std::vector<GridFunction> make_ensemble(const SystemPtr& sys, const EnsembleConfig& cfg,
                                        const SampledSymbol* power_symbol) {
    if (cfg.count < 1) throw std::invalid_argument("make_ensemble: count must be >= 1");
    if (cfg.families.empty()) throw std::invalid_argument("make_ensemble: no families");

    long max_index = 1;
    for (long xi : sys->indices) max_index = std::max(max_index, std::labs(xi));
    const int band = cfg.band_limit > 0 ? cfg.band_limit : std::max<long>(1, max_index / 2);

    // Power iterates form one deterministic sequence, precomputed in order.
    std::vector<GridFunction> iterates;
    if (std::find(cfg.families.begin(), cfg.families.end(), EnsembleFamily::PowerIterates) !=
        cfg.families.end()) {
        if (power_symbol == nullptr || !power_symbol->x_independent)
            throw std::invalid_argument("make_ensemble: power_iterates requires a multiplier symbol");
        Rng rng(member_seed(cfg.seed, -7));
        GridFunction f = band_limited_member(sys, rng, band);
        SampledSymbol adj = adjoint_multiplier(*power_symbol);
        for (int j = 0; j < cfg.count; ++j) {
            GridFunction g = apply(*power_symbol, f);
            GridFunction h = apply_lstar_multiplier(adj, g);
            const double nn = norm(h, 2.0);
            if (nn < 1e-300) break;
            h.values /= nn;
            f = h;
            iterates.push_back(f);
        }
    }

    std::vector<GridFunction> out(cfg.count);
    for (int k = 0; k < cfg.count; ++k) {
        const EnsembleFamily fam = cfg.families[k % cfg.families.size()];
        Rng rng(member_seed(cfg.seed, k));
        switch (fam) {
            case EnsembleFamily::BandLimitedGaussian:
                out[k] = band_limited_member(sys, rng, band);
                break;
            case EnsembleFamily::SingleMode: {
                const int col = (k / static_cast<int>(cfg.families.size())) % sys->modes();
                out[k] = GridFunction{sys->grid, sys->U.col(col)};
                break;
            }
            case EnsembleFamily::Bump: {
                const double c = rng.uniform();
                const double width = std::pow(10.0, -2.0 + 1.5 * rng.uniform());
                out[k] = make_function(sys->grid, [&](double x) {
                    const double d = geodesic_distance(*sys->grid, x, c);
                    return Complex(std::exp(-(d * d) / (width * width)), 0.0);
                });
                break;
            }
            case EnsembleFamily::PowerIterates: {
                if (iterates.empty()) {
                    out[k] = band_limited_member(sys, rng, band);
                } else {
                    out[k] = iterates[std::min<std::size_t>(k / cfg.families.size(),
                                                            iterates.size() - 1)];
                }
                break;
            }
        }
    }
    return out;
}

GridFunction apply(const SampledSymbol& symbol, const GridFunction& f) {
    const SystemPtr& sys = symbol.sys;
    CoefficientVector a = forward(sys, f, Variant::L);
    if (symbol.x_independent) {
        CVec scaled = symbol.table(0).row(0).transpose().array() * a.values.array();
        return inverse(CoefficientVector{sys, std::move(scaled), Variant::L});
    }
    return {sys->grid, (sys->U.array() * symbol.table(0).array()).matrix() * a.values};
}

SampledSymbol adjoint_multiplier(const SampledSymbol& sigma) {
    if (!sigma.x_independent)
        throw std::invalid_argument("adjoint_multiplier: symbol must be x-independent");
    SampledSymbol out = sigma;
    for (auto& t : out.tables) t = t.conjugate();
    return out;
}

GridFunction apply_lstar_multiplier(const SampledSymbol& sigma_star, const GridFunction& g) {
    const SystemPtr& sys = sigma_star.sys;
    CoefficientVector b = forward(sys, g, Variant::Lstar);
    CVec scaled = sigma_star.table(0).row(0).transpose().array() * b.values.array();
    return inverse(CoefficientVector{sys, std::move(scaled), Variant::Lstar});
}

NormEstimate estimate_norm(const SampledSymbol& symbol, double p, double q,
                           const EnsembleConfig& ensemble, TargetNorm target) {
    if (!(p >= 1.0) || !(q >= 1.0))
        throw std::invalid_argument("estimate_norm: p, q must lie in [1, inf]");
    const SystemPtr& sys = symbol.sys;
    std::vector<GridFunction> members = make_ensemble(sys, ensemble, &symbol);
    if (members.empty()) throw std::invalid_argument("estimate_norm: empty ensemble");

    std::vector<double> nums(members.size(), 0.0), dens(members.size(), 0.0);
    parallel_for(0, static_cast<int>(members.size()), [&](int k) {
        const GridFunction& f = members[k];
        const double den = norm(f, p);
        if (den < 1e-300) return;
        GridFunction af = apply(symbol, f);
        nums[k] = target == TargetNorm::Bmo ? bmo_norm(af) : norm(af, q);
        dens[k] = den;
    });

    NormEstimate best;
    best.member_nums = nums;
    best.member_dens = dens;
    for (std::size_t k = 0; k < members.size(); ++k) {
        if (dens[k] <= 0.0) continue;
        const double ratio = nums[k] / dens[k];
        if (ratio > best.value) {
            best.value = ratio;
            best.witness = members[k];
            best.witness_member = static_cast<int>(k);
            best.witness_num = nums[k];
            best.witness_den = dens[k];
        }
    }

    // For (2,2) multipliers, power iteration on A*A sharpens the bound.
    if (target == TargetNorm::Lq && p == 2.0 && q == 2.0 && symbol.x_independent) {
        Rng rng(member_seed(ensemble.seed, -13));
        long max_index = 1;
        for (long xi : sys->indices) max_index = std::max(max_index, std::labs(xi));
        GridFunction f = band_limited_member(sys, rng, std::max<long>(1, max_index));
        SampledSymbol adj = adjoint_multiplier(symbol);
        double prev = -1.0;
        for (int it = 0; it < 200; ++it) {
            const double fn = norm(f, 2.0);
            if (fn < 1e-300) break;
            f.values /= fn;
            GridFunction g = apply(symbol, f);
            const double val = norm(g, 2.0);
            if (val < 1e-300) break;
            if (val > best.value) {
                best.value = val;
                best.witness = f;
                best.witness_member = -1;
                best.witness_num = val;
                best.witness_den = 1.0;
            }
            if (prev >= 0 && std::abs(val - prev) <= 1e-13 * std::max(1.0, val)) break;
            prev = val;
            f = apply_lstar_multiplier(adj, g);
        }
    }
    return best;
}

}  // namespace nhfa
