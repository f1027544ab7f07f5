#include "risopt/replay_buffer.hpp"

#include <algorithm>

#include "risopt/errors.hpp"

namespace risopt {

ReplayBuffer::ReplayBuffer(std::size_t capacity, Eigen::Index state_dim,
                           Eigen::Index action_dim)
    : capacity_(capacity), state_dim_(state_dim), action_dim_(action_dim) {
    if (capacity_ == 0) {
        throw InvalidParameterError("replay buffer capacity must be positive");
    }
    if (state_dim_ < 1 || action_dim_ < 1) {
        throw InvalidParameterError("replay buffer dimensions must be positive");
    }
}

void ReplayBuffer::insert(const Transition& transition) {
    if (transition.state.size() != state_dim_ || transition.next_state.size() != state_dim_) {
        throw ShapeError("transition state length does not match the buffer");
    }
    if (transition.action.size() != action_dim_) {
        throw ShapeError("transition action length does not match the buffer");
    }
    if (storage_.size() < capacity_) {
        storage_.push_back(transition);
    } else {
        storage_[next_slot_] = transition;
    }
    next_slot_ = (next_slot_ + 1) % capacity_;
    ++total_inserted_;
}

std::optional<TransitionBatch> ReplayBuffer::sample(Eigen::Index batch_size, Rng& rng) const {
    if (batch_size < 1) {
        throw InvalidParameterError("batch size must be positive");
    }
    const auto n = static_cast<std::uint64_t>(storage_.size());
    if (static_cast<std::uint64_t>(batch_size) > n) {
        return std::nullopt;
    }

    // Floyd's subset sampling: each of the C(n, k) subsets is equally likely.
    std::vector<std::uint64_t> picks;
    picks.reserve(static_cast<std::size_t>(batch_size));
    for (std::uint64_t j = n - static_cast<std::uint64_t>(batch_size); j < n; ++j) {
        const std::uint64_t candidate = rng.uniform_int(j + 1);
        if (std::find(picks.begin(), picks.end(), candidate) != picks.end()) {
            picks.push_back(j);
        } else {
            picks.push_back(candidate);
        }
    }

    TransitionBatch batch;
    batch.states.resize(state_dim_, batch_size);
    batch.actions.resize(action_dim_, batch_size);
    batch.rewards.resize(batch_size);
    batch.next_states.resize(state_dim_, batch_size);
    batch.done_flags.resize(batch_size);
    for (Eigen::Index j = 0; j < batch_size; ++j) {
        const Transition& t = storage_[static_cast<std::size_t>(picks[static_cast<std::size_t>(j)])];
        batch.states.col(j) = t.state;
        batch.actions.col(j) = t.action;
        batch.rewards(j) = t.reward;
        batch.next_states.col(j) = t.next_state;
        batch.done_flags(j) = t.done ? 1.0 : 0.0;
    }
    return batch;
}

}  // namespace risopt
