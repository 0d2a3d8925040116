#include "sane/bridge.hpp"

#include <algorithm>
#include <cerrno>
#include <cstdlib>
#include <cstring>
#include <stdexcept>
#include <thread>

#include <poll.h>
#include <signal.h>
#include <sys/socket.h>
#include <sys/types.h>
#include <sys/wait.h>
#include <unistd.h>

#include "sane/serialization.hpp"

extern char** environ;

namespace sane {

std::size_t worker_pool_size_from_env(std::size_t fallback) {
    const char* raw = std::getenv("SANE_WORKERS");
    if (raw == nullptr || *raw == '\0') {
        return fallback;
    }
    char* end = nullptr;
    const long value = std::strtol(raw, &end, 10);
    if (*end != '\0' || value < 1) {
        return fallback;
    }
    return static_cast<std::size_t>(value);
}

std::string_view to_string(ExchangeFailure failure) {
    switch (failure) {
        case ExchangeFailure::none:
            return "none";
        case ExchangeFailure::timeout:
            return "timeout";
        case ExchangeFailure::protocol:
            return "protocol";
        case ExchangeFailure::exited:
            return "worker exited";
    }
    return "unknown";
}

WorkerProcess::WorkerProcess(WorkerConfig config) : config_(std::move(config)) {}

WorkerProcess::~WorkerProcess() { stop(); }

void WorkerProcess::start() {
    int fds[2];
    if (::socketpair(AF_UNIX, SOCK_STREAM | SOCK_CLOEXEC, 0, fds) != 0) {
        throw std::runtime_error(std::string("socketpair: ") + std::strerror(errno));
    }

    // Everything the child needs is prepared before fork.
    std::vector<std::string> env_storage;
    for (char** e = environ; *e != nullptr; ++e) {
        const std::string entry(*e);
        const auto key = entry.substr(0, entry.find('='));
        if (config_.env.count(key) == 0) {
            env_storage.push_back(entry);
        }
    }
    for (const auto& [key, value] : config_.env) {
        env_storage.push_back(key + "=" + value);
    }
    std::vector<char*> envp;
    for (auto& e : env_storage) {
        envp.push_back(e.data());
    }
    envp.push_back(nullptr);
    std::string shell = "/bin/sh";
    std::string dash_c = "-c";
    std::string command = config_.command;
    char* argv[] = {shell.data(), dash_c.data(), command.data(), nullptr};

    const pid_t pid = ::fork();
    if (pid < 0) {
        ::close(fds[0]);
        ::close(fds[1]);
        throw std::runtime_error(std::string("fork: ") + std::strerror(errno));
    }
    if (pid == 0) {
        ::setpgid(0, 0);
        ::dup2(fds[1], STDIN_FILENO);
        ::dup2(fds[1], STDOUT_FILENO);
        ::execve(shell.c_str(), argv, envp.data());
        ::_exit(127);
    }
    ::setpgid(pid, pid);
    ::close(fds[1]);
    fd_ = fds[0];
    pid_ = pid;
    ++starts_;
    buffer_.clear();
}

void WorkerProcess::kill_now() {
    if (fd_ >= 0) {
        ::close(fd_);
        fd_ = -1;
    }
    if (pid_ > 0) {
        ::kill(-pid_, SIGKILL);
        ::kill(pid_, SIGKILL);
        ::waitpid(pid_, nullptr, 0);
        pid_ = -1;
    }
    buffer_.clear();
}

void WorkerProcess::stop() {
    if (pid_ <= 0) {
        return;
    }
    // Closing the channel is the shutdown signal; give the worker a moment.
    ::close(fd_);
    fd_ = -1;
    for (int i = 0; i < 50; ++i) {
        if (::waitpid(pid_, nullptr, WNOHANG) == pid_) {
            pid_ = -1;
            return;
        }
        std::this_thread::sleep_for(std::chrono::milliseconds(10));
    }
    kill_now();
}

ExchangeFailure WorkerProcess::send_line(const std::string& line) {
    std::size_t sent = 0;
    while (sent < line.size()) {
        const ssize_t n = ::send(fd_, line.data() + sent, line.size() - sent, MSG_NOSIGNAL);
        if (n < 0) {
            if (errno == EINTR) {
                continue;
            }
            return ExchangeFailure::exited;
        }
        sent += static_cast<std::size_t>(n);
    }
    return ExchangeFailure::none;
}

ExchangeFailure WorkerProcess::read_line(std::string& line, std::chrono::steady_clock::time_point deadline) {
    for (;;) {
        const auto newline = buffer_.find('\n');
        if (newline != std::string::npos) {
            line = buffer_.substr(0, newline);
            buffer_.erase(0, newline + 1);
            return ExchangeFailure::none;
        }
        const auto left = std::chrono::duration_cast<std::chrono::milliseconds>(deadline - std::chrono::steady_clock::now());
        if (left.count() <= 0) {
            return ExchangeFailure::timeout;
        }
        pollfd pfd{fd_, POLLIN, 0};
        const int ready = ::poll(&pfd, 1, static_cast<int>(std::min<long long>(left.count(), 1000 * 60 * 60)));
        if (ready < 0) {
            if (errno == EINTR) {
                continue;
            }
            return ExchangeFailure::exited;
        }
        if (ready == 0) {
            continue;
        }
        char chunk[4096];
        const ssize_t n = ::recv(fd_, chunk, sizeof chunk, 0);
        if (n < 0 && errno == EINTR) {
            continue;
        }
        if (n <= 0) {
            return ExchangeFailure::exited;
        }
        buffer_.append(chunk, static_cast<std::size_t>(n));
    }
}

ExchangeFailure WorkerProcess::exchange(const EvaluationRequest& request, EvaluationResponse& response) {
    if (pid_ <= 0) {
        start();
    }
    const auto deadline = std::chrono::steady_clock::now() + config_.timeout;
    ExchangeFailure failure = send_line(encode_request_line(request) + "\n");
    std::string line;
    if (failure == ExchangeFailure::none) {
        failure = read_line(line, deadline);
    }
    if (failure == ExchangeFailure::none) {
        try {
            response = decode_response_line(line);
            if (response.genotype_id != request.genotype_id) {
                failure = ExchangeFailure::protocol;
            }
        } catch (const FormatError&) {
            failure = ExchangeFailure::protocol;
        }
    }
    if (failure != ExchangeFailure::none) {
        kill_now();
    }
    return failure;
}

BridgeEvaluator::BridgeEvaluator(WorkerConfig config) {
    if (config.command.empty()) {
        throw std::invalid_argument("worker command is empty");
    }
    const std::size_t size = std::max<std::size_t>(1, config.pool_size);
    for (std::size_t i = 0; i < size; ++i) {
        workers_.push_back(std::make_unique<WorkerProcess>(config));
    }
    for (auto it = workers_.rbegin(); it != workers_.rend(); ++it) {
        idle_.push_back(it->get());
    }
}

BridgeEvaluator::~BridgeEvaluator() = default;

WorkerProcess* BridgeEvaluator::acquire() {
    std::unique_lock lock(mutex_);
    available_.wait(lock, [this] { return !idle_.empty(); });
    WorkerProcess* worker = idle_.back();
    idle_.pop_back();
    return worker;
}

void BridgeEvaluator::release(WorkerProcess* worker) {
    {
        std::lock_guard lock(mutex_);
        idle_.push_back(worker);
    }
    available_.notify_one();
}

int BridgeEvaluator::restarts() const {
    std::lock_guard lock(mutex_);
    int total = 0;
    for (const auto& w : workers_) {
        total += w->restarts();
    }
    return total;
}

EvaluationResponse BridgeEvaluator::evaluate(const Genotype&, const EvaluationRequest& request) {
    WorkerProcess* worker = acquire();
    EvaluationResponse response;
    ExchangeFailure failure = ExchangeFailure::none;
    try {
        failure = worker->exchange(request, response);
        if (failure != ExchangeFailure::none) {
            failure = worker->exchange(request, response);
        }
    } catch (const std::exception& e) {
        release(worker);
        return EvaluationResponse::error(request.genotype_id, e.what());
    }
    release(worker);
    if (failure != ExchangeFailure::none) {
        return EvaluationResponse::error(request.genotype_id, std::string(to_string(failure)));
    }
    return response;
}

}  // namespace sane
