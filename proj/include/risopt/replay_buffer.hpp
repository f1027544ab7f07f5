#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <vector>

#include "risopt/rng.hpp"

namespace risopt {

struct Transition {
    Eigen::VectorXd state;
    Eigen::VectorXd action;
    double reward = 0.0;
    Eigen::VectorXd next_state;
    bool done = false;
};

// Column j of each matrix is sample j.
struct TransitionBatch {
    Eigen::MatrixXd states;
    Eigen::MatrixXd actions;
    Eigen::RowVectorXd rewards;
    Eigen::MatrixXd next_states;
    Eigen::RowVectorXd done_flags;

    Eigen::Index size() const { return states.cols(); }
};

// Fixed-capacity FIFO ring. Storage grows on demand up to the capacity so
// short runs never pay for the full buffer.
class ReplayBuffer {
  public:
    ReplayBuffer(std::size_t capacity, Eigen::Index state_dim, Eigen::Index action_dim);

    void insert(const Transition& transition);

    // Uniform batch without replacement. Returns nullopt while the buffer
    // holds fewer than batch_size transitions.
    std::optional<TransitionBatch> sample(Eigen::Index batch_size, Rng& rng) const;

    std::size_t size() const { return storage_.size(); }
    std::size_t capacity() const { return capacity_; }
    std::uint64_t total_inserted() const { return total_inserted_; }
    Eigen::Index state_dim() const { return state_dim_; }
    Eigen::Index action_dim() const { return action_dim_; }

  private:
    std::size_t capacity_;
    Eigen::Index state_dim_;
    Eigen::Index action_dim_;
    std::vector<Transition> storage_;
    std::size_t next_slot_ = 0;
    std::uint64_t total_inserted_ = 0;
};

}  // namespace risopt
