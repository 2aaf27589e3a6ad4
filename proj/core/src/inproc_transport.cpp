#include "snn/inproc_transport.hpp"

#include <string>

#include "snn/error.hpp"

namespace snn {

class InprocTransport final : public Transport {
public:
    InprocTransport(InprocHub& hub, int rank) : hub_(hub), rank_(rank) {}
    ~InprocTransport() override { hub_.depart(rank_); }

    int rank() const noexcept override { return rank_; }
    int n_ranks() const noexcept override { return hub_.n_ranks_; }

    void send(int peer, Step step, std::span<const std::byte> payload) override {
        check_peer(peer);
        auto& ch = hub_.channel(rank_, peer);
        {
            std::lock_guard lock(ch.mutex);
            ch.queue.push_back({step, std::vector<std::byte>(payload.begin(), payload.end())});
        }
        ch.ready.notify_one();
        ++stats_.messages_sent;
        stats_.bytes_sent += payload.size();
    }

    std::vector<std::byte> recv(int peer, Step step) override {
        check_peer(peer);
        auto& ch = hub_.channel(peer, rank_);
        std::unique_lock lock(ch.mutex);
        const auto deadline = std::chrono::steady_clock::now() + hub_.timeout_;
        while (ch.queue.empty()) {
            // A departed sender can still have queued messages; only give up
            // once the queue is drained.
            if (hub_.departed(peer)) throw ExchangeError(peer, "peer disconnected");
            if (ch.ready.wait_until(lock, deadline) == std::cv_status::timeout && ch.queue.empty()) {
                throw ExchangeError(peer, "timed out waiting for step " + std::to_string(step));
            }
        }
        InprocHub::Message msg = std::move(ch.queue.front());
        ch.queue.pop_front();
        lock.unlock();
        if (msg.step != step) {
            throw ProtocolError("rank " + std::to_string(peer) + " sent a message for step " +
                                std::to_string(msg.step) + " while step " + std::to_string(step) +
                                " was expected");
        }
        ++stats_.messages_received;
        stats_.bytes_received += msg.payload.size();
        return std::move(msg.payload);
    }

    void barrier(Step step) override {
        std::unique_lock lock(hub_.state_mutex_);
        const auto generation = hub_.barrier_generation_;
        if (++hub_.barrier_waiting_ == hub_.n_ranks_) {
            hub_.barrier_waiting_ = 0;
            ++hub_.barrier_generation_;
            lock.unlock();
            hub_.barrier_cv_.notify_all();
            return;
        }
        const auto deadline = std::chrono::steady_clock::now() + hub_.timeout_;
        while (hub_.barrier_generation_ == generation) {
            for (int r = 0; r < hub_.n_ranks_; ++r) {
                if (hub_.departed_[r]) {
                    --hub_.barrier_waiting_;
                    throw BarrierError("barrier at step " + std::to_string(step) + ": rank " +
                                       std::to_string(r) + " is gone");
                }
            }
            if (hub_.barrier_cv_.wait_until(lock, deadline) == std::cv_status::timeout &&
                hub_.barrier_generation_ == generation) {
                --hub_.barrier_waiting_;
                throw BarrierError("barrier at step " + std::to_string(step) + " timed out");
            }
        }
    }

private:
    void check_peer(int peer) const {
        if (peer < 0 || peer >= hub_.n_ranks_ || peer == rank_) {
            throw ContractError("invalid peer rank " + std::to_string(peer));
        }
    }

    InprocHub& hub_;
    int rank_;
};

InprocHub::InprocHub(int n_ranks, std::chrono::milliseconds timeout)
    : n_ranks_(n_ranks), timeout_(timeout), taken_(n_ranks, false), departed_(n_ranks, false) {
    if (n_ranks < 1) throw ConfigError("in-process transport needs at least one rank");
    channels_.reserve(static_cast<std::size_t>(n_ranks) * n_ranks);
    for (int i = 0; i < n_ranks * n_ranks; ++i) channels_.push_back(std::make_unique<Channel>());
}

InprocHub::~InprocHub() = default;

std::unique_ptr<Transport> InprocHub::endpoint(int rank) {
    std::lock_guard lock(state_mutex_);
    if (rank < 0 || rank >= n_ranks_) throw ConfigError("rank out of range");
    if (taken_[rank]) throw ConfigError("endpoint for rank " + std::to_string(rank) + " already taken");
    taken_[rank] = true;
    return std::make_unique<InprocTransport>(*this, rank);
}

void InprocHub::depart(int rank) {
    {
        std::lock_guard lock(state_mutex_);
        departed_[rank] = true;
    }
    barrier_cv_.notify_all();
    for (int r = 0; r < n_ranks_; ++r) {
        auto& ch = channel(rank, r);
        std::lock_guard lock(ch.mutex);
        ch.ready.notify_all();
    }
}

bool InprocHub::departed(int rank) {
    std::lock_guard lock(state_mutex_);
    return departed_[rank];
}

}  // namespace snn
