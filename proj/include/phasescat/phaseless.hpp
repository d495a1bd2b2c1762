#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "phasescat/field_matrix.hpp"
#include "phasescat/geometry.hpp"

// Intensity-only measurement triples, the polarization identity that
// recovers the cross term, and branch resolution of the phase difference.
namespace phasescat::phaseless {

using complex = std::complex<double>;
using BoolMatrix = Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic>;

/// r = |v(x, z0)| per receiver, s = |v(x, z)|, t = |v(x, z0) + v(x, z)| over receivers x sources.
struct PhaselessTriple {
    Eigen::VectorXd r;
    Eigen::MatrixXd s;
    Eigen::MatrixXd t;
    std::optional<geometry::SourceReceiverLayout> layout;
};

/// Moduli of v0 (receivers) and v (receivers x sources) and of their sums.
PhaselessTriple triple_from_fields(const Eigen::VectorXcd& v0, const Eigen::MatrixXcd& v);
/// Splits a layout field matrix (z0 in the last column) into a triple.
PhaselessTriple triple_from_matrix(const solver::FieldMatrix& m);

/// Total-field triple for the scatterer over the layout.
PhaselessTriple synthesize_triple(const solver::Scatterer& scatterer, const geometry::SourceReceiverLayout& layout);

/// Largest violation of |r - s| <= t <= r + s (0 when every entry complies).
double triangle_violation(const PhaselessTriple& triple);

/// (t^2 - r^2 - s^2) / 2 = Re{v(x, z0) conj(v(x, z))}.
Eigen::MatrixXd cross_term(const PhaselessTriple& triple);

inline constexpr double kDefaultTauRel = 1e-8;
inline constexpr double kClipTolerance = 1e-9;

/// Rectangle of receiver rows [row0, row1) and source columns [col0, col1).
struct Block {
    Eigen::Index row0 = 0, row1 = 0, col0 = 0, col1 = 0;
    Eigen::Index rows() const { return row1 - row0; }
    Eigen::Index cols() const { return col1 - col0; }
};

struct NonvanishingMask {
    BoolMatrix mask;
    double tau_r = 0.0;   // absolute thresholds applied to r and s
    double tau_s = 0.0;
    Block block;          // largest all-true rectangle
    double coverage = 0.0;  // fraction of true entries
};

/// Entries with r > tau_rel max r and s > tau_rel max s. Throws DataError when empty.
NonvanishingMask nonvanishing_mask(const PhaselessTriple& triple, double tau_rel = kDefaultTauRel);

struct BranchField {
    Eigen::MatrixXd cos_delta;   // clipped to [-1, 1] on the mask, 0 elsewhere
    Eigen::MatrixXd magnitude;   // arccos(cos_delta); candidates are +/- magnitude
    NonvanishingMask mask;
    double max_overshoot = 0.0;  // largest |cos| - 1 before clipping
};

/// Throws DataError when |cos| exceeds 1 by more than kClipTolerance.
BranchField branch_candidates(const PhaselessTriple& triple, double tau_rel = kDefaultTauRel);

/// Field over the grid recovered up to a row factor e^{i gamma(x)}: values are
/// s e^{-i delta} with delta the resolved phase difference arg v(x, z0) - arg v(x, z).
struct RecoveredField {
    Eigen::MatrixXcd values;      // 0 outside the mask block
    Eigen::MatrixXd delta;        // resolved phase differences in (-pi, pi]
    Block block;
    bool indeterminate = false;   // a single column carries no continuity information
    bool vote_available = false;  // layout geometry present for the prior vote
    std::vector<double> row_scores;  // coherence of delta - prior along each row, in [0, 1]
    double consistency = 1.0;     // coherence across rows of the row offsets
    double conjugate_score = 0.0; // same, after undoing a conjugated reference field
    bool branch_conflict = false;
};

inline constexpr double kConflictThreshold = 0.5;

/// Reference medium whose point-source phase predicts the phase difference in the vote.
enum class PhasePrior { free_space, half_plane };

/// Sign choice by a Viterbi pass per receiver row along the source grid,
/// minimising squared third differences of the wrapped phase path and
/// polished against local interpolants. A triple carrying its layout then
/// orients each row towards the prior phase difference arg P(x, z0) - arg P(x, z).
/// Throws DataError ("branch ambiguity") when a chosen increment comes within
/// 0.5 rad of pi.
RecoveredField resolve_branch(const BranchField& branch, const PhaselessTriple& triple,
                              PhasePrior prior = PhasePrior::free_space);

struct BranchScore {
    std::vector<double> row_scores;
    double consistency = 0.0;
    double conjugate_score = 0.0;
    bool conflict = false;
};

/// Row offsets theta(x) = arg sum_z e^{i(delta - prior)} of an oriented delta
/// field. Genuine data leaves theta smooth and small, so consistency =
/// |mean e^{i theta}| is near 1. A conjugated reference field shifts theta by
/// -2 arg P(x, z0); conjugate_score measures coherence after undoing that shift.
/// Conflict when consistency < kConflictThreshold or conjugate_score >= consistency.
BranchScore score_branch(const Eigen::MatrixXd& delta, const Block& block,
                         const geometry::SourceReceiverLayout& layout, PhasePrior prior = PhasePrior::free_space);

/// Per-row range of arg(recovered conj(truth)) over the block.
std::vector<double> phase_spread(const RecoveredField& recovered, const Eigen::MatrixXcd& truth);

struct Discrepancy {
    double total = 0.0;
    double r = 0.0;
    double s = 0.0;
    double t = 0.0;
};

/// RMS of the concatenated [r; s; t] differences over the RMS of a; the
/// r/s/t parts use the same normaliser. Throws ConfigError on layout mismatch.
Discrepancy discrepancy(const PhaselessTriple& a, const PhaselessTriple& b);

void write_triple_csv(std::ostream& os, const PhaselessTriple& triple);
PhaselessTriple read_triple_csv(std::istream& is);

/// Block entries only; header receiver_ix,source_ix,re,im,delta.
void write_recovered_csv(std::ostream& os, const RecoveredField& field);
/// Restores values, delta and the block; the vote fields keep their defaults.
RecoveredField read_recovered_csv(std::istream& is, Eigen::Index receivers, Eigen::Index sources);

}  // namespace phasescat::phaseless
