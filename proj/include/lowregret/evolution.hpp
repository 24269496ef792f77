#pragma once

#include "lowregret/fractional_operator.hpp"

#include <memory>
#include <stdexcept>

namespace lowregret {

/// Raised when (I + dt A) cannot be Cholesky-factorized, which means the
/// operator is not symmetric positive definite.
class SolverError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Implicit Euler for  d_t p + A p = source  (forward) and
/// -d_t p + A p = source  (backward), sharing one factorization of I + dt A.
///
/// Forward:   (I + dt A) q^{m+1} = q^m + dt source^{m+1},   q^0 given.
/// Backward:  (I + dt A) p^{m-1} = p^m + dt source^m,       p^M given.
///
/// With these indexings, and the right-endpoint Q inner product, the map
/// source -> trajectory (zero initial data) of forward() has as exact
/// transpose the map source -> shift(backward(source, 0)), where shift moves
/// backward slice m-1 into control slot m. See to_control_slots().
class EvolutionSolver {
public:
    EvolutionSolver(std::shared_ptr<const FracOperator> op, const TimeGrid& tgrid);

    const FracOperator& op() const { return *op_; }
    const SpatialGrid& grid() const { return op_->grid(); }
    const TimeGrid& tgrid() const { return tgrid_; }

    /// Slice 0 of source is never read.
    SpaceTimeField forward(const SpaceTimeField& source, const SpatialField& initial) const;
    /// Homogeneous forward solve from the given initial data.
    SpaceTimeField forward_free(const SpatialField& initial) const;
    /// Slice 0 of source is never read.
    SpaceTimeField backward(const SpaceTimeField& source, const SpatialField& terminal) const;

    /// (I + dt A)^{-1} rhs
    SpatialField step_solve(const SpatialField& rhs) const;

private:
    std::shared_ptr<const FracOperator> op_;
    TimeGrid tgrid_;
    Eigen::LLT<Eigen::MatrixXd> factor_;
};

/// Slot m (m = 1..M) of the result is slice m-1 of the backward trajectory;
/// slot 0 is zero. This is the Q-space representation of an adjoint field.
SpaceTimeField to_control_slots(const SpaceTimeField& backward_trajectory);

struct ForwardProblem {
    std::shared_ptr<const FracOperator> op;
    TimeGrid tgrid;
    SpaceTimeField source;
    SpatialField initial;
};

struct BackwardProblem {
    std::shared_ptr<const FracOperator> op;
    TimeGrid tgrid;
    SpaceTimeField source;
    SpatialField terminal;
};

SpaceTimeField solve_forward(const ForwardProblem& p);
SpaceTimeField solve_backward(const BackwardProblem& p);

/// Discrete equation residuals, re-substituting a trajectory into the scheme:
/// ||(p^m - p^{m-1})/dt + A p^m - source^m||_Q (forward)
double forward_equation_residual(const FracOperator& op, const TimeGrid& tgrid,
                                 const SpaceTimeField& traj, const SpaceTimeField& source);
/// ||-(p^m - p^{m-1})/dt + A p^{m-1} - source^m||_Q (backward)
double backward_equation_residual(const FracOperator& op, const TimeGrid& tgrid,
                                  const SpaceTimeField& traj, const SpaceTimeField& source);

}  // namespace lowregret
