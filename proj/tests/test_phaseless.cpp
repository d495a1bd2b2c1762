#include <doctest.h>

#include <cmath>
#include <complex>
#include <numbers>
#include <random>
#include <sstream>

#include "phasescat/errors.hpp"
#include "phasescat/phaseless.hpp"

using namespace phasescat;
using namespace phasescat::phaseless;
using Eigen::Index;

namespace {

constexpr double kPi = std::numbers::pi;

Eigen::MatrixXcd random_matrix(std::mt19937_64& rng, Index rows, Index cols) {
    std::normal_distribution<double> n(0.0, 1.0);
    Eigen::MatrixXcd m(rows, cols);
    for (Index i = 0; i < rows; ++i)
        for (Index j = 0; j < cols; ++j) m(i, j) = complex(n(rng), n(rng));
    return m;
}

geometry::SourceReceiverLayout default_layout(double k, int points) {
    const double radius = std::min(2.0, 2.0 / k);
    const auto g = geometry::make_admissible_arc({-3, 4}, radius, kPi, 2 * kPi, points, k);
    const auto s = geometry::make_admissible_arc({3, 4}, radius, kPi, 2 * kPi, points, k);
    return {geometry::default_reference_source(g, s, k), g, s, k};
}

double max_spread(const RecoveredField& rec, const Eigen::MatrixXcd& truth) {
    double m = 0.0;
    for (double v : phase_spread(rec, truth)) m = std::max(m, v);
    return m;
}

// Smooth phase differences along each row with a random row offset and
// moduli bounded away from zero.
void smooth_fields(std::mt19937_64& rng, Index rows, Index cols, Eigen::VectorXcd& v0, Eigen::MatrixXcd& v) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    v0.resize(rows);
    v.resize(rows, cols);
    for (Index i = 0; i < rows; ++i) {
        const double gamma = kPi * u(rng), a = 1.5 * u(rng), b = 0.8 * u(rng), c = 0.3 + 0.2 * u(rng);
        v0(i) = (1.2 + 0.3 * u(rng)) * std::exp(complex(0, gamma));
        for (Index j = 0; j < cols; ++j) {
            const double x = static_cast<double>(j) / (cols - 1);
            const double delta = a + b * std::sin(2.0 * x + c) + 0.5 * x;
            v(i, j) = (1.0 + 0.4 * std::cos(3.0 * x + c)) * std::exp(complex(0, gamma - delta));
        }
    }
}

}  // namespace

TEST_CASE("property: cross term identity on random matrices") {
    std::mt19937_64 rng(7);
    for (int trial = 0; trial < 20; ++trial) {
        const Eigen::VectorXcd v0 = random_matrix(rng, 9, 1).col(0);
        const Eigen::MatrixXcd v = random_matrix(rng, 9, 13);
        const auto triple = triple_from_fields(v0, v);
        const Eigen::MatrixXd c = cross_term(triple);
        double scale = 0.0, err = 0.0;
        for (Index i = 0; i < 9; ++i)
            for (Index j = 0; j < 13; ++j) {
                const double exact = (v0(i) * std::conj(v(i, j))).real();
                err = std::max(err, std::abs(c(i, j) - exact));
                scale = std::max(scale, std::abs(v0(i)) * std::abs(v(i, j)));
            }
        CHECK(err <= 1e-12 * scale);
        CHECK(triangle_violation(triple) <= 1e-15 * scale);
    }
}

TEST_CASE("property: the triple is invariant under a common row phase") {
    std::mt19937_64 rng(11);
    const Eigen::VectorXcd v0 = random_matrix(rng, 6, 1).col(0);
    const Eigen::MatrixXcd v = random_matrix(rng, 6, 5);
    Eigen::VectorXcd w0 = v0;
    Eigen::MatrixXcd w = v;
    std::uniform_real_distribution<double> u(-kPi, kPi);
    for (Index i = 0; i < 6; ++i) {
        const complex e = std::exp(complex(0, u(rng)));
        w0(i) *= e;
        w.row(i) *= e;
    }
    const auto a = triple_from_fields(v0, v), b = triple_from_fields(w0, w);
    CHECK((a.r - b.r).cwiseAbs().maxCoeff() <= 1e-14);
    CHECK((a.s - b.s).cwiseAbs().maxCoeff() <= 1e-14);
    CHECK((a.t - b.t).cwiseAbs().maxCoeff() <= 1e-13);
    CHECK(discrepancy(a, b).total <= 1e-13);
}

TEST_CASE("property: aligned and orthogonal phasors") {
    Eigen::VectorXcd v0(2);
    v0 << complex(1, 0), complex(0, 2);
    Eigen::MatrixXcd same(2, 3), quarter(2, 3);
    for (Index i = 0; i < 2; ++i)
        for (Index j = 0; j < 3; ++j) {
            same(i, j) = (0.5 + j) * v0(i);
            quarter(i, j) = complex(0, 1) * (0.5 + j) * v0(i);
        }
    const auto bs = branch_candidates(triple_from_fields(v0, same));
    CHECK(bs.magnitude.cwiseAbs().maxCoeff() == 0.0);
    const auto bq = branch_candidates(triple_from_fields(v0, quarter));
    CHECK((bq.magnitude.array() - kPi / 2).abs().maxCoeff() <= 1e-12);
    const auto rec = resolve_branch(bq, triple_from_fields(v0, quarter));
    CHECK((rec.delta.array().abs() - kPi / 2).abs().maxCoeff() <= 1e-12);
}

TEST_CASE("single-column grids are indeterminate") {
    Eigen::VectorXcd v0(3);
    v0 << 1.0, 2.0, complex(0, 1);
    Eigen::MatrixXcd v(3, 1);
    v << complex(0.3, 0.4), complex(-1, 0.1), 2.0;
    const auto triple = triple_from_fields(v0, v);
    const auto rec = resolve_branch(branch_candidates(triple), triple);
    CHECK(rec.indeterminate);
}

TEST_CASE("property: smooth phase differences are recovered row by row up to the sign ambiguity") {
    std::mt19937_64 rng(23);
    for (int trial = 0; trial < 10; ++trial) {
        Eigen::VectorXcd v0;
        Eigen::MatrixXcd v;
        smooth_fields(rng, 8, 24, v0, v);
        const auto triple = triple_from_fields(v0, v);
        const auto rec = resolve_branch(branch_candidates(triple), triple);
        REQUIRE(rec.block.rows() == 8);
        REQUIRE(rec.block.cols() == 24);
        CHECK_FALSE(rec.vote_available);
        for (Index i = 0; i < 8; ++i) {
            double plus = 0.0, minus = 0.0;
            for (Index j = 0; j < 24; ++j) {
                const double truth = std::arg(v0(i) * std::conj(v(i, j)));
                plus = std::max(plus, std::abs(std::remainder(rec.delta(i, j) - truth, 2 * kPi)));
                minus = std::max(minus, std::abs(std::remainder(rec.delta(i, j) + truth, 2 * kPi)));
            }
            CHECK(std::min(plus, minus) <= 1e-7);
        }
    }
}

TEST_CASE("branch ambiguity is reported when increments approach pi") {
    Eigen::VectorXcd v0(1);
    v0 << 1.0;
    Eigen::MatrixXcd v(1, 4);
    v << 1.0, std::exp(complex(0, 3.0)), 1.0, std::exp(complex(0, 3.0));
    const auto triple = triple_from_fields(v0, v);
    CHECK_THROWS_WITH_AS(resolve_branch(branch_candidates(triple), triple), doctest::Contains("branch ambiguity"),
                         DataError);
}

TEST_CASE("disk data over the default layout: exact recovery and the conjugation adversary") {
    for (double k : {0.7, 1.0, 2.0}) {
        const auto layout = default_layout(k, 16);
        const solver::Scatterer sc = oracles::DiskSpec::soft({0, 0}, 1.0);
        const auto m = solver::field_matrix(sc, layout, solver::Semantics::total);
        const auto triple = synthesize_triple(sc, layout);
        REQUIRE(triple.layout.has_value());
        CHECK(triangle_violation(triple) <= 1e-12);
        const auto rec = resolve_branch(branch_candidates(triple), triple);
        CHECK(rec.vote_available);
        CHECK_FALSE(rec.branch_conflict);
        CHECK(max_spread(rec, m.values.leftCols(m.values.cols() - 1)) <= 1e-6);

        // conj(v) injected into s and t, r kept.
        Eigen::MatrixXcd v = m.values.leftCols(m.values.cols() - 1);
        const Eigen::VectorXcd v0 = m.values.col(m.values.cols() - 1);
        auto adversary = triple_from_fields(v0, v.conjugate());
        adversary.layout = layout;
        const auto bad = resolve_branch(branch_candidates(adversary), adversary);
        CHECK(bad.branch_conflict);
    }
}

TEST_CASE("nonvanishing mask and candidate errors") {
    Eigen::VectorXcd v0(3);
    v0 << 1.0, 0.0, 2.0;
    Eigen::MatrixXcd v = Eigen::MatrixXcd::Constant(3, 4, complex(0.5, 0.5));
    v(2, 3) = 0.0;
    const auto mask = nonvanishing_mask(triple_from_fields(v0, v));
    CHECK_FALSE(mask.mask(1, 0));
    CHECK_FALSE(mask.mask(2, 3));
    CHECK(mask.mask(0, 3));
    CHECK(mask.block.rows() * mask.block.cols() == 4);  // row 0, all columns
    CHECK(mask.coverage == doctest::Approx(7.0 / 12.0));

    const auto zero = triple_from_fields(Eigen::VectorXcd::Zero(2), Eigen::MatrixXcd::Zero(2, 2));
    CHECK_THROWS_WITH_AS(nonvanishing_mask(zero), doctest::Contains("degenerate"), DataError);
    CHECK_THROWS_AS(nonvanishing_mask(triple_from_fields(v0, v), -1.0), ConfigError);
    CHECK_THROWS_AS(nonvanishing_mask(triple_from_fields(v0, v), 1.0), ConfigError);

    auto inconsistent = triple_from_fields(v0, v);
    inconsistent.t(0, 0) += 1.0;  // t > r + s
    CHECK_THROWS_AS(branch_candidates(inconsistent), DataError);
    inconsistent.t(0, 0) -= 1.0 - 1e-12;  // within the clip tolerance
    CHECK_NOTHROW(branch_candidates(inconsistent));
}

TEST_CASE("discrepancy decomposition and mismatch") {
    std::mt19937_64 rng(5);
    const Eigen::VectorXcd v0 = random_matrix(rng, 4, 1).col(0);
    const Eigen::MatrixXcd v = random_matrix(rng, 4, 6);
    const auto a = triple_from_fields(v0, v);
    const auto b = triple_from_fields(1.1 * v0, v + 0.1 * random_matrix(rng, 4, 6));
    CHECK(discrepancy(a, a).total == 0.0);
    const auto d = discrepancy(a, b);
    CHECK(d.total > 0.0);
    CHECK(d.total * d.total == doctest::Approx(d.r * d.r + d.s * d.s + d.t * d.t).epsilon(1e-12));
    const auto c = triple_from_fields(v0, v.leftCols(5));
    CHECK_THROWS_WITH_AS(discrepancy(a, c), doctest::Contains("layout mismatch"), ConfigError);
}

TEST_CASE("triple and recovered CSV round trips are exact") {
    const auto layout = default_layout(1.0, 6);
    const solver::Scatterer sc = oracles::DiskSpec::impedance({0, 0}, 1.0, 1.0);
    const auto triple = triple_from_matrix(solver::field_matrix(sc, layout, solver::Semantics::total));
    std::stringstream ss;
    write_triple_csv(ss, triple);
    const std::string first = ss.str();
    CHECK(first.rfind("receiver_ix,source_ix,r,s,t\n", 0) == 0);
    const auto back = read_triple_csv(ss);
    CHECK(back.r == triple.r);
    CHECK(back.s == triple.s);
    CHECK(back.t == triple.t);
    std::stringstream again;
    write_triple_csv(again, back);
    CHECK(again.str() == first);

    const auto rec = resolve_branch(branch_candidates(triple), triple);
    std::stringstream rs;
    write_recovered_csv(rs, rec);
    const auto rback = read_recovered_csv(rs, triple.s.rows(), triple.s.cols());
    CHECK(rback.values == rec.values);
    CHECK(rback.delta == rec.delta);
    CHECK(rback.block.rows() == rec.block.rows());

    std::stringstream broken("receiver_ix,source_ix,r,s\n0,0,1,1\n");
    CHECK_THROWS_AS(read_triple_csv(broken), DataError);
}
