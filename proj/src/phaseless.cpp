#include "phasescat/phaseless.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <istream>
#include <limits>
#include <numbers>
#include <ostream>
#include <sstream>

#include "phasescat/csv.hpp"
#include "phasescat/errors.hpp"
#include "phasescat/solver.hpp"

namespace phasescat::phaseless {
namespace {

constexpr double kPi = std::numbers::pi;

double wrap(double a) {
    double w = std::remainder(a, 2.0 * kPi);
    if (w <= -kPi) w += 2.0 * kPi;
    return w;
}

// Largest all-true rectangle by the row-histogram method.
Block largest_block(const BoolMatrix& m) {
    const Eigen::Index rows = m.rows(), cols = m.cols();
    std::vector<Eigen::Index> height(cols, 0);
    Block best;
    Eigen::Index best_area = 0;
    for (Eigen::Index i = 0; i < rows; ++i) {
        for (Eigen::Index j = 0; j < cols; ++j) height[j] = m(i, j) ? height[j] + 1 : 0;
        std::vector<Eigen::Index> stack;
        for (Eigen::Index j = 0; j <= cols; ++j) {
            const Eigen::Index h = j < cols ? height[j] : 0;
            while (!stack.empty() && height[stack.back()] >= h) {
                const Eigen::Index top = height[stack.back()];
                stack.pop_back();
                const Eigen::Index left = stack.empty() ? 0 : stack.back() + 1;
                const Eigen::Index area = top * (j - left);
                if (area > best_area) {
                    best_area = area;
                    best = {i + 1 - top, i + 1, left, j};
                }
            }
            stack.push_back(j);
        }
    }
    return best;
}

// Signs (+1/-1) along one row minimising the squared differences of order
// `order` (2 or 3) of the unwrapped path; the first column is fixed to +1.
// The state is the sign pattern of the last `order` columns.
std::vector<int> viterbi_signs(const std::vector<double>& mag) {
    const int n = static_cast<int>(mag.size());
    std::vector<int> sign(n, 1);
    if (n < 2) return sign;
    auto value = [&](int j, int s) { return s > 0 ? mag[j] : -mag[j]; };
    if (n == 2) {
        sign[1] = std::abs(wrap(mag[1] - mag[0])) <= std::abs(wrap(-mag[1] - mag[0])) ? 1 : -1;
        return sign;
    }
    const int order = n >= 4 ? 3 : 2;
    const int states = 1 << order;
    // Bit b of a state is the sign (1 = negative) of column j - order + 1 + b.
    auto sgn = [](int state, int b) { return (state >> b) & 1 ? -1 : 1; };
    constexpr double kInf = std::numeric_limits<double>::infinity();
    std::vector<double> cost(states, kInf);
    for (int st = 0; st < states; ++st) {
        if ((st & 1) == 0) cost[st] = 0.0;  // column 0 is positive
    }
    std::vector<std::vector<int>> from(n, std::vector<int>(states, 0));
    for (int j = order; j < n; ++j) {
        std::vector<double> next(states, kInf);
        for (int st = 0; st < states; ++st) {
            if (cost[st] == kInf) continue;
            for (int bit = 0; bit < 2; ++bit) {
                const int ns = (st >> 1) | (bit << (order - 1));
                // The term spans columns j - order .. j: the state plus the new sign.
                std::array<double, 4> v{};
                for (int b = 0; b < order; ++b) v[b] = value(j - order + b, sgn(st, b));
                v[order] = value(j, bit ? -1 : 1);
                std::array<double, 3> d{};
                for (int b = 0; b < order; ++b) d[b] = wrap(v[b + 1] - v[b]);
                const double t = order == 3 ? d[2] - 2.0 * d[1] + d[0] : d[1] - d[0];
                const double c = cost[st] + t * t;
                if (c < next[ns]) {
                    next[ns] = c;
                    from[j][ns] = st;
                }
            }
        }
        cost = std::move(next);
    }
    int st = static_cast<int>(std::min_element(cost.begin(), cost.end()) - cost.begin());
    for (int j = n - 1; j >= order; --j) {
        sign[j] = sgn(st, order - 1);
        st = from[j][st];
    }
    for (int b = 0; b < order; ++b) sign[b] = sgn(st, b);
    return sign;
}

// Polishes a Viterbi path: an entry whose |delta| is near 0 or pi costs little
// to flip, so each sign is re-chosen against a Lagrange interpolant of the
// unwrapped neighbours on both sides until no sign changes.
void refine_signs(const std::vector<double>& mag, std::vector<int>& sign) {
    const int n = static_cast<int>(mag.size());
    if (n < 4) return;
    constexpr int kHalf = 3;
    for (int pass = 0; pass < 2 * n; ++pass) {
        std::vector<double> u(n);
        u[0] = sign[0] * mag[0];
        for (int j = 1; j < n; ++j) u[j] = u[j - 1] + wrap(sign[j] * mag[j] - sign[j - 1] * mag[j - 1]);
        bool changed = false;
        for (int j = 0; j < n; ++j) {
            int lo = std::max(0, j - kHalf), hi = std::min(n - 1, j + kHalf);
            // Keep the stencil at 2 kHalf neighbours near the ends.
            if (j - kHalf < 0) hi = std::min(n - 1, hi + (kHalf - j));
            if (j + kHalf > n - 1) lo = std::max(0, lo - (j + kHalf - (n - 1)));
            double pred = 0.0;
            for (int m = lo; m <= hi; ++m) {
                if (m == j) continue;
                double w = 1.0;
                for (int q = lo; q <= hi; ++q) {
                    if (q != j && q != m) w *= static_cast<double>(j - q) / (m - q);
                }
                pred += w * u[m];
            }
            const double ep = std::abs(wrap(mag[j] - pred)), em = std::abs(wrap(-mag[j] - pred));
            const int best = ep <= em ? 1 : -1;
            if (best != sign[j] && std::abs(ep - em) > 1e-12) {
                sign[j] = best;
                changed = true;
            }
        }
        if (!changed) break;
    }
}

double predicted_phase(const geometry::SourceReceiverLayout& layout, PhasePrior prior, const solver::Vec2& x,
                       const solver::Vec2& z) {
    const complex v = prior == PhasePrior::half_plane ? solver::halfplane_green(layout.k, x, z)
                                                       : solver::fundamental_2d(layout.k, x, z);
    return std::arg(v);
}

bool same_points(const std::vector<solver::Vec2>& a, const std::vector<solver::Vec2>& b) {
    if (a.size() != b.size()) return false;
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (geometry::distance(a[i], b[i]) > 1e-12 * (1.0 + geometry::norm(a[i]))) return false;
    }
    return true;
}

}  // namespace

PhaselessTriple triple_from_fields(const Eigen::VectorXcd& v0, const Eigen::MatrixXcd& v) {
    if (v0.size() != v.rows()) throw DataError("reference column and field matrix have different receiver counts");
    PhaselessTriple out;
    out.r = v0.cwiseAbs();
    out.s = v.cwiseAbs();
    out.t.resize(v.rows(), v.cols());
    for (Eigen::Index j = 0; j < v.cols(); ++j) out.t.col(j) = (v0 + v.col(j)).cwiseAbs();
    return out;
}

PhaselessTriple triple_from_matrix(const solver::FieldMatrix& m) {
    if (m.values.cols() < 2) throw DataError("field matrix needs at least one source column plus z0");
    const Eigen::Index n = m.values.cols() - 1;
    return triple_from_fields(m.values.col(n), m.values.leftCols(n));
}

PhaselessTriple synthesize_triple(const solver::Scatterer& scatterer, const geometry::SourceReceiverLayout& layout) {
    auto triple = triple_from_matrix(solver::field_matrix(scatterer, layout, solver::Semantics::total));
    triple.layout = layout;
    return triple;
}

double triangle_violation(const PhaselessTriple& triple) {
    double worst = 0.0;
    for (Eigen::Index i = 0; i < triple.s.rows(); ++i) {
        for (Eigen::Index j = 0; j < triple.s.cols(); ++j) {
            const double r = triple.r(i), s = triple.s(i, j), t = triple.t(i, j);
            worst = std::max({worst, std::abs(r - s) - t, t - (r + s), -r, -s, -t});
        }
    }
    return worst;
}

Eigen::MatrixXd cross_term(const PhaselessTriple& triple) {
    Eigen::MatrixXd c(triple.s.rows(), triple.s.cols());
    for (Eigen::Index j = 0; j < c.cols(); ++j) {
        for (Eigen::Index i = 0; i < c.rows(); ++i) {
            const double r = triple.r(i), s = triple.s(i, j), t = triple.t(i, j);
            c(i, j) = 0.5 * (t * t - r * r - s * s);
        }
    }
    return c;
}

NonvanishingMask nonvanishing_mask(const PhaselessTriple& triple, double tau_rel) {
    if (!(tau_rel > 0.0 && tau_rel < 1.0)) throw ConfigError("tau_rel must lie in (0, 1)");
    NonvanishingMask out;
    out.tau_r = tau_rel * (triple.r.size() ? triple.r.maxCoeff() : 0.0);
    out.tau_s = tau_rel * (triple.s.size() ? triple.s.maxCoeff() : 0.0);
    out.mask.resize(triple.s.rows(), triple.s.cols());
    Eigen::Index count = 0;
    for (Eigen::Index i = 0; i < triple.s.rows(); ++i) {
        for (Eigen::Index j = 0; j < triple.s.cols(); ++j) {
            out.mask(i, j) = triple.r(i) > out.tau_r && triple.s(i, j) > out.tau_s;
            count += out.mask(i, j);
        }
    }
    if (count == 0) throw DataError("degenerate data: no entry with r and s above the nonvanishing threshold");
    out.coverage = static_cast<double>(count) / static_cast<double>(triple.s.size());
    out.block = largest_block(out.mask);
    return out;
}

BranchField branch_candidates(const PhaselessTriple& triple, double tau_rel) {
    BranchField out;
    out.mask = nonvanishing_mask(triple, tau_rel);
    const Eigen::MatrixXd cross = cross_term(triple);
    out.cos_delta = Eigen::MatrixXd::Zero(cross.rows(), cross.cols());
    out.magnitude = Eigen::MatrixXd::Zero(cross.rows(), cross.cols());
    for (Eigen::Index i = 0; i < cross.rows(); ++i) {
        for (Eigen::Index j = 0; j < cross.cols(); ++j) {
            if (!out.mask.mask(i, j)) continue;
            const double c = cross(i, j) / (triple.r(i) * triple.s(i, j));
            out.max_overshoot = std::max(out.max_overshoot, std::abs(c) - 1.0);
            out.cos_delta(i, j) = std::clamp(c, -1.0, 1.0);
            out.magnitude(i, j) = std::acos(out.cos_delta(i, j));
        }
    }
    if (out.max_overshoot > kClipTolerance) {
        std::ostringstream os;
        os << "data inconsistency: |cos delta| exceeds 1 by " << out.max_overshoot;
        throw DataError(os.str());
    }
    return out;
}

RecoveredField resolve_branch(const BranchField& branch, const PhaselessTriple& triple, PhasePrior prior) {
    RecoveredField out;
    const Block& b = branch.mask.block;
    out.block = b;
    out.values = Eigen::MatrixXcd::Zero(triple.s.rows(), triple.s.cols());
    out.delta = Eigen::MatrixXd::Zero(triple.s.rows(), triple.s.cols());
    out.indeterminate = b.cols() == 1;
    out.vote_available = triple.layout.has_value() && !out.indeterminate;

    std::vector<Eigen::Index> ambiguous;
    for (Eigen::Index i = b.row0; i < b.row1; ++i) {
        std::vector<double> mag;
        for (Eigen::Index j = b.col0; j < b.col1; ++j) mag.push_back(branch.magnitude(i, j));
        auto sign = viterbi_signs(mag);
        refine_signs(mag, sign);
        std::vector<double> delta(mag.size());
        for (std::size_t j = 0; j < mag.size(); ++j) delta[j] = sign[j] * mag[j];
        for (std::size_t j = 0; j + 1 < delta.size(); ++j) {
            if (std::abs(wrap(delta[j + 1] - delta[j])) > kPi - 0.5) ambiguous.push_back(b.col0 + j + 1);
        }
        if (out.vote_available) {
            const auto& layout = *triple.layout;
            const auto& x = layout.sigma.point(static_cast<int>(i));
            const double ref = predicted_phase(layout, prior, x, layout.z0);
            complex plus{}, minus{};
            for (std::size_t j = 0; j < delta.size(); ++j) {
                const double pred = ref - predicted_phase(layout, prior, x, layout.gamma.point(static_cast<int>(b.col0 + j)));
                plus += std::polar(1.0, delta[j] - pred);
                minus += std::polar(1.0, -delta[j] - pred);
            }
            if (std::abs(minus) > std::abs(plus)) {
                for (auto& d : delta) d = -d;
            }
        }
        for (std::size_t j = 0; j < delta.size(); ++j) {
            const Eigen::Index col = b.col0 + static_cast<Eigen::Index>(j);
            out.delta(i, col) = wrap(delta[j]);
            out.values(i, col) = std::polar(triple.s(i, col), -delta[j]);
        }
    }
    if (!ambiguous.empty()) {
        std::sort(ambiguous.begin(), ambiguous.end());
        ambiguous.erase(std::unique(ambiguous.begin(), ambiguous.end()), ambiguous.end());
        std::ostringstream os;
        os << "branch ambiguity: phase increments within 0.5 rad of pi at columns";
        for (auto c : ambiguous) os << ' ' << c;
        throw DataError(os.str());
    }
    if (out.vote_available && b.rows() > 0) {
        auto score = score_branch(out.delta, b, *triple.layout, prior);
        out.row_scores = std::move(score.row_scores);
        out.consistency = score.consistency;
        out.conjugate_score = score.conjugate_score;
        out.branch_conflict = score.conflict;
    }
    return out;
}

BranchScore score_branch(const Eigen::MatrixXd& delta, const Block& block,
                         const geometry::SourceReceiverLayout& layout, PhasePrior prior) {
    BranchScore out;
    if (block.rows() <= 0 || block.cols() <= 0) throw DataError("empty block has no branch to score");
    complex aligned{}, conjugated{};
    for (Eigen::Index i = block.row0; i < block.row1; ++i) {
        const auto& x = layout.sigma.point(static_cast<int>(i));
        const double ref = predicted_phase(layout, prior, x, layout.z0);
        complex acc{};
        for (Eigen::Index j = block.col0; j < block.col1; ++j) {
            const double pred = ref - predicted_phase(layout, prior, x, layout.gamma.point(static_cast<int>(j)));
            acc += std::polar(1.0, delta(i, j) - pred);
        }
        out.row_scores.push_back(std::abs(acc) / static_cast<double>(block.cols()));
        const double theta = std::arg(acc);
        aligned += std::polar(1.0, theta);
        conjugated += std::polar(1.0, theta + 2.0 * ref);
    }
    out.consistency = std::abs(aligned) / static_cast<double>(block.rows());
    out.conjugate_score = std::abs(conjugated) / static_cast<double>(block.rows());
    out.conflict = out.consistency < kConflictThreshold || out.conjugate_score >= out.consistency;
    return out;
}

std::vector<double> phase_spread(const RecoveredField& recovered, const Eigen::MatrixXcd& truth) {
    const Block& b = recovered.block;
    std::vector<double> out;
    for (Eigen::Index i = b.row0; i < b.row1; ++i) {
        const double a0 = std::arg(recovered.values(i, b.col0) * std::conj(truth(i, b.col0)));
        double lo = 0.0, hi = 0.0;
        for (Eigen::Index j = b.col0; j < b.col1; ++j) {
            const double d = wrap(std::arg(recovered.values(i, j) * std::conj(truth(i, j))) - a0);
            lo = std::min(lo, d);
            hi = std::max(hi, d);
        }
        out.push_back(hi - lo);
    }
    return out;
}

Discrepancy discrepancy(const PhaselessTriple& a, const PhaselessTriple& b) {
    if (a.r.size() != b.r.size() || a.s.rows() != b.s.rows() || a.s.cols() != b.s.cols() ||
        a.t.rows() != b.t.rows() || a.t.cols() != b.t.cols()) {
        throw ConfigError("layout mismatch: triples have different grid sizes");
    }
    if (a.layout && b.layout) {
        const auto &la = *a.layout, &lb = *b.layout;
        if (la.k != lb.k || !same_points({la.z0}, {lb.z0}) || !same_points(la.gamma.points(), lb.gamma.points()) ||
            !same_points(la.sigma.points(), lb.sigma.points())) {
            throw ConfigError("layout mismatch: triples were measured on different layouts");
        }
    }
    const double norm2 = a.r.squaredNorm() + a.s.squaredNorm() + a.t.squaredNorm();
    if (!(norm2 > 0.0)) throw DataError("reference triple is identically zero");
    Discrepancy d;
    d.r = std::sqrt((a.r - b.r).squaredNorm() / norm2);
    d.s = std::sqrt((a.s - b.s).squaredNorm() / norm2);
    d.t = std::sqrt((a.t - b.t).squaredNorm() / norm2);
    d.total = std::sqrt(d.r * d.r + d.s * d.s + d.t * d.t);
    return d;
}

void write_triple_csv(std::ostream& os, const PhaselessTriple& triple) {
    os << "receiver_ix,source_ix,r,s,t\n";
    for (Eigen::Index i = 0; i < triple.s.rows(); ++i) {
        for (Eigen::Index j = 0; j < triple.s.cols(); ++j) {
            os << i << ',' << j << ',' << csv::format_double(triple.r(i)) << ',' << csv::format_double(triple.s(i, j))
               << ',' << csv::format_double(triple.t(i, j)) << '\n';
        }
    }
}

PhaselessTriple read_triple_csv(std::istream& is) {
    const auto table = csv::read_table(is, {"receiver_ix", "source_ix", "r", "s", "t"});
    Eigen::Index rows = 0, cols = 0;
    for (const auto& row : table) {
        rows = std::max<Eigen::Index>(rows, csv::parse_index(row[0]) + 1);
        cols = std::max<Eigen::Index>(cols, csv::parse_index(row[1]) + 1);
    }
    PhaselessTriple out;
    const double nan = std::numeric_limits<double>::quiet_NaN();
    out.r = Eigen::VectorXd::Constant(rows, nan);
    out.s = Eigen::MatrixXd::Constant(rows, cols, nan);
    out.t = Eigen::MatrixXd::Constant(rows, cols, nan);
    for (const auto& row : table) {
        const auto i = csv::parse_index(row[0]), j = csv::parse_index(row[1]);
        const double r = csv::parse_double(row[2]);
        if (!std::isnan(out.r(i)) && out.r(i) != r) throw DataError("inconsistent r values for one receiver");
        out.r(i) = r;
        out.s(i, j) = csv::parse_double(row[3]);
        out.t(i, j) = csv::parse_double(row[4]);
    }
    if (out.s.hasNaN() || out.t.hasNaN() || out.r.hasNaN()) throw DataError("triple CSV has missing entries");
    return out;
}

void write_recovered_csv(std::ostream& os, const RecoveredField& field) {
    os << "receiver_ix,source_ix,re,im,delta\n";
    const Block& b = field.block;
    for (Eigen::Index i = b.row0; i < b.row1; ++i) {
        for (Eigen::Index j = b.col0; j < b.col1; ++j) {
            os << i << ',' << j << ',' << csv::format_double(field.values(i, j).real()) << ','
               << csv::format_double(field.values(i, j).imag()) << ',' << csv::format_double(field.delta(i, j))
               << '\n';
        }
    }
}

RecoveredField read_recovered_csv(std::istream& is, Eigen::Index receivers, Eigen::Index sources) {
    const auto table = csv::read_table(is, {"receiver_ix", "source_ix", "re", "im", "delta"});
    RecoveredField out;
    out.values = Eigen::MatrixXcd::Zero(receivers, sources);
    out.delta = Eigen::MatrixXd::Zero(receivers, sources);
    if (table.empty()) return out;
    Eigen::Index r0 = receivers, r1 = 0, c0 = sources, c1 = 0;
    for (const auto& row : table) {
        const auto i = csv::parse_index(row[0]), j = csv::parse_index(row[1]);
        if (i >= receivers || j >= sources) throw DataError("recovered CSV index outside the grid");
        out.values(i, j) = complex(csv::parse_double(row[2]), csv::parse_double(row[3]));
        out.delta(i, j) = csv::parse_double(row[4]);
        r0 = std::min<Eigen::Index>(r0, i);
        r1 = std::max<Eigen::Index>(r1, i + 1);
        c0 = std::min<Eigen::Index>(c0, j);
        c1 = std::max<Eigen::Index>(c1, j + 1);
    }
    out.block = {r0, r1, c0, c1};
    if (static_cast<Eigen::Index>(table.size()) != out.block.rows() * out.block.cols()) {
        throw DataError("recovered CSV does not cover a full block");
    }
    out.indeterminate = out.block.cols() == 1;
    return out;
}

}  // namespace phasescat::phaseless
