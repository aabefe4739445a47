#include "nlqfi/twinbeam.hpp"
#include "oracles/propagator_exp.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

using namespace nlqfi;

namespace {

constexpr double L = 4e7;

PhaseMatching make_pm(double delta_K, double sigma_K, double g) {
    PhaseMatching pm;
    pm.delta_K = delta_K;
    pm.sigma_K = sigma_K;
    pm.nu = std::sqrt(cplx(sigma_K * sigma_K - 4.0 * g * g, 0.0));
    return pm;
}

void expect_close(cplx a, cplx b, double tol) {
    EXPECT_LE(std::abs(a - b), tol) << a << " vs " << b;
}

struct Draw {
    double delta_K, sigma_K, g, phase;
};

Draw random_draw(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::uniform_real_distribution<double> pos(0.0, 1.0);
    return {u(rng) * 2e-7, u(rng) * 2e-7, pos(rng) * 6e-8, u(rng) * 3.14159};
}

}  // namespace

TEST(Propagator, IdentityAtZeroCoupling) {
    const Propagator p = propagator(make_pm(0, 0, 0), 0.0, L);
    expect_close(p.u_ss, 1.0, 1e-15);
    expect_close(p.u_ii, 1.0, 1e-15);
    expect_close(p.u_si, 0.0, 1e-15);
    expect_close(p.u_is, 0.0, 1e-15);
}

TEST(Propagator, PhaseMatchedHyperbolic) {
    const double g = std::asinh(std::sqrt(3.0)) / L;
    const Propagator p = propagator(make_pm(0, 0, g), g, L);
    EXPECT_NEAR(std::norm(p.u_si), std::pow(std::sinh(g * L), 2), 1e-12);
    EXPECT_NEAR(std::norm(p.u_ss), std::pow(std::cosh(g * L), 2), 1e-12);
}

TEST(Propagator, MatchesMatrixExponential) {
    std::mt19937_64 rng(20240607);
    for (int n = 0; n < 100; ++n) {
        const Draw d = random_draw(rng);
        const cplx gamma = std::polar(d.g, d.phase);
        const auto pm = make_pm(d.delta_K, d.sigma_K, d.g);
        const Propagator p = propagator(pm, gamma, L);
        const Propagator q = oracle::propagator_exp(pm, gamma, L);
        const double scale = std::max(1.0, std::abs(q.u_ss));
        expect_close(p.u_ss, q.u_ss, 1e-10 * scale);
        expect_close(p.u_ii, q.u_ii, 1e-10 * scale);
        expect_close(p.u_si, q.u_si, 1e-10 * scale);
        expect_close(p.u_is, q.u_is, 1e-10 * scale);
    }
}

TEST(Propagator, BogoliubovInvariant) {
    std::mt19937_64 rng(7);
    for (int n = 0; n < 100; ++n) {
        const Draw d = random_draw(rng);
        const Propagator p = propagator(make_pm(d.delta_K, d.sigma_K, d.g), std::polar(d.g, d.phase), L);
        const double lhs = std::norm(p.u_ss) - std::norm(p.u_si);
        EXPECT_NEAR(lhs, 1.0, 1e-12 * std::max(1.0, std::norm(p.u_ss)));
        if (d.g > 0) expect_close(p.u_is, -std::conj(std::polar(1.0, d.phase)) / std::polar(1.0, d.phase) * p.u_si, 1e-12 * std::abs(p.u_si) + 1e-300);
    }
}

TEST(Propagator, CompositionOverLength) {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> frac(0.05, 0.95);
    for (int n = 0; n < 100; ++n) {
        const Draw d = random_draw(rng);
        const cplx gamma = std::polar(d.g, d.phase);
        const auto pm = make_pm(d.delta_K, d.sigma_K, d.g);
        const double l1 = frac(rng) * L;
        const Propagator a = propagator(pm, gamma, l1);
        const Propagator b = propagator(pm, gamma, L - l1);
        const Propagator full = propagator(pm, gamma, L);
        const double scale = std::max(1.0, std::abs(full.u_ss));
        expect_close(b.u_ss * a.u_ss + b.u_si * a.u_is, full.u_ss, 1e-10 * scale);
        expect_close(b.u_ss * a.u_si + b.u_si * a.u_ii, full.u_si, 1e-10 * scale);
        expect_close(b.u_is * a.u_ss + b.u_ii * a.u_is, full.u_is, 1e-10 * scale);
        expect_close(b.u_is * a.u_si + b.u_ii * a.u_ii, full.u_ii, 1e-10 * scale);
    }
}

TEST(Propagator, SeriesBranchContinuity) {
    // |νL| straddling the series threshold, reached through Σ_K ≈ 2|γ|.
    const double g = 1e-8;
    for (double target : {kSeriesThreshold * (1 - 1e-9), kSeriesThreshold * (1 + 1e-9)}) {
        const double nu = target / L;
        const double sigma = std::sqrt(4 * g * g + nu * nu);
        const auto pm = make_pm(3e-9, sigma, g);
        const Propagator p = propagator(pm, g, L);
        const Propagator q = oracle::propagator_exp(pm, g, L);
        expect_close(p.u_ss, q.u_ss, 1e-10);
        expect_close(p.u_si, q.u_si, 1e-10);
        expect_close(p.u_ii, q.u_ii, 1e-10);
    }
    const double sigma_lo = std::sqrt(4 * g * g + std::pow(kSeriesThreshold * (1 - 1e-12) / L, 2));
    const double sigma_hi = std::sqrt(4 * g * g + std::pow(kSeriesThreshold * (1 + 1e-12) / L, 2));
    const Propagator lo = propagator(make_pm(0, sigma_lo, g), g, L);
    const Propagator hi = propagator(make_pm(0, sigma_hi, g), g, L);
    expect_close(lo.u_ss, hi.u_ss, 1e-10);
    expect_close(lo.u_si, hi.u_si, 1e-10);
}

TEST(Propagator, BranchIndependence) {
    std::mt19937_64 rng(3);
    for (int n = 0; n < 50; ++n) {
        const Draw d = random_draw(rng);
        auto pm = make_pm(d.delta_K, d.sigma_K, d.g);
        const cplx gamma = std::polar(d.g, d.phase);
        const Propagator a = propagator(pm, gamma, L);
        pm.nu = -pm.nu;
        const Propagator b = propagator(pm, gamma, L);
        const double scale = std::max(1.0, std::abs(a.u_ss));
        expect_close(a.u_ss, b.u_ss, 1e-12 * scale);
        expect_close(a.u_si, b.u_si, 1e-12 * scale);
        expect_close(a.u_ii, b.u_ii, 1e-12 * scale);
    }
}

TEST(Propagator, InconsistentNuRejected) {
    EXPECT_THROW(propagator(make_pm(0, 0, 1e-8), 2e-8, L), std::invalid_argument);
}

TEST(VacuumMoments, IdentityAndTmsv) {
    const Moments zero = vacuum_moments(Propagator{});
    EXPECT_EQ(zero.n_s, 0.0);
    EXPECT_EQ(zero.m, cplx(0.0));

    const double g = std::asinh(1.0) / L;
    const Moments m = vacuum_moments(propagator(make_pm(0, 0, g), g, L));
    EXPECT_NEAR(m.n_s, 1.0, 1e-12);
    EXPECT_NEAR(m.n_i, 1.0, 1e-12);
    EXPECT_NEAR(std::norm(m.m), 2.0, 1e-12);
}

TEST(VacuumMoments, ClosedFormsForRandomDraws) {
    std::mt19937_64 rng(99);
    for (int n = 0; n < 100; ++n) {
        const Draw d = random_draw(rng);
        const auto pm = make_pm(d.delta_K, d.sigma_K, d.g);
        const Moments m = vacuum_moments(propagator(pm, d.g, L));
        // N = |2γ sin(νL/2)/ν|², M = u_ss u_is* written out term by term
        const cplx s = std::sin(pm.nu * L / 2.0) / pm.nu;
        const cplx c = std::cos(pm.nu * L / 2.0);
        const cplx i1(0, 1);
        const double n_closed = std::norm(2.0 * d.g * s);
        const cplx ph = std::exp(i1 * pm.delta_K * L / 2.0);
        const cplx m_closed = ph * (c + i1 * pm.sigma_K * s) * std::conj(-2.0 * i1 * d.g * ph * s);
        EXPECT_NEAR(m.n_s, n_closed, 1e-10 * std::max(n_closed, 1e-20));
        EXPECT_LE(std::abs(m.m - m_closed), 1e-10 * std::max(std::abs(m_closed), 1e-20));
    }
}

TEST(SeededMoments, VacuumInputReducesToVacuum) {
    const double g = 3e-8;
    const auto pm = make_pm(1e-8, 2e-8, g);
    const cplx gamma = std::polar(g, 0.4);
    const Propagator p = propagator(pm, gamma, L);
    const Moments a = seeded_moments(p, Moments{}, gamma);
    const Moments b = vacuum_moments(p);
    EXPECT_NEAR(a.n_s, b.n_s, 1e-12 * b.n_s);
    EXPECT_NEAR(a.n_i, b.n_i, 1e-12 * b.n_s);
    EXPECT_LE(std::abs(a.m - b.m), 1e-12 * std::abs(b.m));
}

TEST(SeededMoments, IdentityPassThrough) {
    const Moments in{2.0, 1.5, cplx(0.3, -1.1)};
    const Moments out = seeded_moments(Propagator{}, in, 1.0);
    EXPECT_EQ(out.n_s, in.n_s);
    EXPECT_EQ(out.n_i, in.n_i);
    EXPECT_EQ(out.m, in.m);
}

TEST(SeededMoments, LosslessRecombination) {
    const double g = std::asinh(std::sqrt(2.0)) / L;
    const auto pm = make_pm(0, 0, g);
    const Moments first = vacuum_moments(propagator(pm, g, L));
    const double n = first.n_s;
    // Second pass in phase with the first doubles the squeezing: 4N(1+N).
    const Moments bright = seeded_moments(propagator(pm, g, L), first, g);
    EXPECT_NEAR(bright.n_s, 4 * n * (1 + n), 1e-10 * n);
    // Pump phase π undoes it.
    const cplx flipped = std::polar(g, M_PI);
    const Moments dark = seeded_moments(propagator(pm, flipped, L), first, flipped);
    EXPECT_NEAR(dark.n_s, 0.0, 1e-10);
}

TEST(ApplyLoss, Examples) {
    const Moments in{1.0, 1.0, cplx(1.0, 0.0)};
    const Moments same = apply_loss(in, LossChannel{});
    EXPECT_EQ(same.n_s, 1.0);
    EXPECT_EQ(same.m, cplx(1.0, 0.0));

    const Moments dead = apply_loss(Moments{2.0, 3.0, cplx(1, 1)}, LossChannel::idler_only(0.0));
    EXPECT_EQ(dead.n_s, 2.0);
    EXPECT_EQ(dead.n_i, 0.0);
    EXPECT_EQ(dead.m, cplx(0.0));

    const Moments out = apply_loss(in, LossChannel{1.0, 0.25, 0.0, M_PI / 2});
    EXPECT_NEAR(out.n_s, 1.0, 1e-15);
    EXPECT_NEAR(out.n_i, 0.25, 1e-15);
    EXPECT_NEAR(out.m.real(), 0.0, 1e-15);
    EXPECT_NEAR(out.m.imag(), 0.5, 1e-15);
}

TEST(ApplyLoss, Multiplicative) {
    const Moments in{1.7, 0.9, cplx(0.4, 0.8)};
    const LossChannel a{0.8, 0.6, 0.3, -0.2};
    const LossChannel b{0.5, 0.7, 1.1, 0.4};
    const LossChannel ab{0.4, 0.42, 1.4, 0.2};
    const Moments x = apply_loss(apply_loss(in, a), b);
    const Moments y = apply_loss(in, ab);
    EXPECT_NEAR(x.n_s, y.n_s, 1e-14);
    EXPECT_NEAR(x.n_i, y.n_i, 1e-14);
    EXPECT_LE(std::abs(x.m - y.m), 1e-14);
}

TEST(ApplyLoss, InvalidTransmission) {
    EXPECT_THROW(apply_loss(Moments{}, LossChannel{1.2, 1.0, 0, 0}), std::invalid_argument);
    EXPECT_THROW(apply_loss(Moments{}, LossChannel{1.0, -0.1, 0, 0}), std::invalid_argument);
}
