#pragma once

#include <chrono>
#include <condition_variable>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include "sane/fitness.hpp"

namespace sane {

struct WorkerConfig {
    /// Shell command line; the worker reads requests on stdin and answers on stdout.
    std::string command;
    std::chrono::milliseconds timeout{60000};
    /// Extra environment for the worker process.
    std::map<std::string, std::string> env;
    std::size_t pool_size = 1;

    friend bool operator==(const WorkerConfig&, const WorkerConfig&) = default;
};

/// Pool size from SANE_WORKERS when set and positive, otherwise `fallback`.
std::size_t worker_pool_size_from_env(std::size_t fallback);

/// Why a single exchange with a worker failed.
enum class ExchangeFailure { none, timeout, protocol, exited };
std::string_view to_string(ExchangeFailure failure);

/// One worker process speaking newline-delimited JSON. Not thread-safe;
/// the pool hands each worker to one caller at a time.
class WorkerProcess {
public:
    explicit WorkerProcess(WorkerConfig config);
    ~WorkerProcess();
    WorkerProcess(const WorkerProcess&) = delete;
    WorkerProcess& operator=(const WorkerProcess&) = delete;

    /// Sends one request line and waits for the response with the same id.
    /// Starts the process on first use. On failure the process is killed.
    ExchangeFailure exchange(const EvaluationRequest& request, EvaluationResponse& response);

    bool running() const { return pid_ > 0; }
    int restarts() const { return starts_ > 0 ? starts_ - 1 : 0; }
    void stop();

private:
    void start();
    void kill_now();
    ExchangeFailure send_line(const std::string& line);
    ExchangeFailure read_line(std::string& line, std::chrono::steady_clock::time_point deadline);

    WorkerConfig config_;
    int pid_ = -1;
    int fd_ = -1;
    int starts_ = 0;
    std::string buffer_;
};

/// Evaluates phenotypes through a pool of worker processes. A failed exchange
/// restarts the worker and retries once; a second failure becomes an error
/// response whose message names the failure ("timeout", "protocol",
/// "worker exited").
class BridgeEvaluator final : public Evaluator {
public:
    explicit BridgeEvaluator(WorkerConfig config);
    ~BridgeEvaluator() override;

    EvaluationResponse evaluate(const Genotype& genotype, const EvaluationRequest& request) override;
    bool needs_phenotype() const override { return true; }
    std::size_t max_concurrency() const override { return workers_.size(); }

    /// Total worker restarts so far.
    int restarts() const;

private:
    WorkerProcess* acquire();
    void release(WorkerProcess* worker);

    std::vector<std::unique_ptr<WorkerProcess>> workers_;
    std::vector<WorkerProcess*> idle_;
    mutable std::mutex mutex_;
    std::condition_variable available_;
};

}  // namespace sane
