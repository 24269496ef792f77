#include "lowregret/evolution.hpp"

#include <cmath>

namespace lowregret {

EvolutionSolver::EvolutionSolver(std::shared_ptr<const FracOperator> op, const TimeGrid& tgrid)
    : op_(std::move(op)), tgrid_(tgrid) {
    if (!op_) throw DomainError("EvolutionSolver: null operator");
    const int n = op_->size();
    Eigen::MatrixXd system = Eigen::MatrixXd::Identity(n, n) + tgrid_.dt * op_->matrix();
    factor_.compute(system);
    if (factor_.info() != Eigen::Success) {
        throw SolverError("EvolutionSolver: I + dt A is not positive definite");
    }
}

SpatialField EvolutionSolver::step_solve(const SpatialField& rhs) const {
    return factor_.solve(rhs);
}

SpaceTimeField EvolutionSolver::forward(const SpaceTimeField& source,
                                        const SpatialField& initial) const {
    check_dims(source, grid(), tgrid_, "forward source");
    check_dims(initial, grid(), "forward initial");
    const double dt = tgrid_.dt;
    SpaceTimeField traj(tgrid_.M + 1, grid().n);
    traj.row(0) = initial.transpose();
    SpatialField rhs(grid().n);
    for (int m = 0; m < tgrid_.M; ++m) {
        rhs = traj.row(m).transpose() + dt * source.row(m + 1).transpose();
        traj.row(m + 1) = step_solve(rhs).transpose();
    }
    return traj;
}

SpaceTimeField EvolutionSolver::forward_free(const SpatialField& initial) const {
    check_dims(initial, grid(), "forward initial");
    SpaceTimeField traj(tgrid_.M + 1, grid().n);
    traj.row(0) = initial.transpose();
    for (int m = 0; m < tgrid_.M; ++m) {
        traj.row(m + 1) = step_solve(traj.row(m).transpose()).transpose();
    }
    return traj;
}

SpaceTimeField EvolutionSolver::backward(const SpaceTimeField& source,
                                         const SpatialField& terminal) const {
    check_dims(source, grid(), tgrid_, "backward source");
    check_dims(terminal, grid(), "backward terminal");
    const double dt = tgrid_.dt;
    const int M = tgrid_.M;
    SpaceTimeField traj(M + 1, grid().n);
    traj.row(M) = terminal.transpose();
    SpatialField rhs(grid().n);
    for (int m = M; m >= 1; --m) {
        rhs = traj.row(m).transpose() + dt * source.row(m).transpose();
        traj.row(m - 1) = step_solve(rhs).transpose();
    }
    return traj;
}

SpaceTimeField to_control_slots(const SpaceTimeField& backward_trajectory) {
    SpaceTimeField out = SpaceTimeField::Zero(backward_trajectory.rows(),
                                              backward_trajectory.cols());
    const auto M = backward_trajectory.rows() - 1;
    out.bottomRows(M) = backward_trajectory.topRows(M);
    return out;
}

SpaceTimeField solve_forward(const ForwardProblem& p) {
    return EvolutionSolver(p.op, p.tgrid).forward(p.source, p.initial);
}

SpaceTimeField solve_backward(const BackwardProblem& p) {
    return EvolutionSolver(p.op, p.tgrid).backward(p.source, p.terminal);
}

double forward_equation_residual(const FracOperator& op, const TimeGrid& tgrid,
                                 const SpaceTimeField& traj, const SpaceTimeField& source) {
    const auto& grid = op.grid();
    check_dims(traj, grid, tgrid, "forward_equation_residual");
    check_dims(source, grid, tgrid, "forward_equation_residual");
    SpaceTimeField res = SpaceTimeField::Zero(tgrid.M + 1, grid.n);
    for (int m = 1; m <= tgrid.M; ++m) {
        SpatialField pm = traj.row(m).transpose();
        SpatialField r = (pm - traj.row(m - 1).transpose()) / tgrid.dt + op.matrix() * pm -
                         source.row(m).transpose();
        res.row(m) = r.transpose();
    }
    return norm_Q(res, grid, tgrid);
}

double backward_equation_residual(const FracOperator& op, const TimeGrid& tgrid,
                                  const SpaceTimeField& traj, const SpaceTimeField& source) {
    const auto& grid = op.grid();
    check_dims(traj, grid, tgrid, "backward_equation_residual");
    check_dims(source, grid, tgrid, "backward_equation_residual");
    SpaceTimeField res = SpaceTimeField::Zero(tgrid.M + 1, grid.n);
    for (int m = 1; m <= tgrid.M; ++m) {
        SpatialField prev = traj.row(m - 1).transpose();
        SpatialField r = -(traj.row(m).transpose() - prev) / tgrid.dt + op.matrix() * prev -
                         source.row(m).transpose();
        res.row(m) = r.transpose();
    }
    return norm_Q(res, grid, tgrid);
}

}  // namespace lowregret
