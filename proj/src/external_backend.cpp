#include <cerrno>
#include <cstring>
#include <spawn.h>
#include <sys/socket.h>
#include <sys/wait.h>
#include <poll.h>
#include <signal.h>
#include <unistd.h>

#include "dnas/error.hpp"
#include "dnas/evaluator.hpp"
#include "dnas/serialization.hpp"

extern char** environ;

namespace dnas {

using Clock = std::chrono::steady_clock;
using nlohmann::ordered_json;

struct ExternalBackend::Process {
    pid_t pid = -1;
    int fd = -1; // parent end of the socketpair, wired to the child's stdin and stdout
    std::string buffer;

    ~Process() {
        if (fd >= 0) ::close(fd);
        if (pid > 0) {
            ::kill(pid, SIGKILL);
            int status = 0;
            ::waitpid(pid, &status, 0);
        }
    }

    void write_line(const std::string& line) {
        std::string data = line + "\n";
        std::size_t sent = 0;
        while (sent < data.size()) {
            const ssize_t n = ::send(fd, data.data() + sent, data.size() - sent, MSG_NOSIGNAL);
            if (n < 0) {
                if (errno == EINTR) continue;
                throw EvaluationError(std::string("backend process not accepting requests: ") + std::strerror(errno));
            }
            sent += static_cast<std::size_t>(n);
        }
    }

    /// Reads one line; nullopt on timeout.
    std::optional<std::string> read_line(Clock::time_point deadline) {
        for (;;) {
            if (const auto nl = buffer.find('\n'); nl != std::string::npos) {
                std::string line = buffer.substr(0, nl);
                buffer.erase(0, nl + 1);
                return line;
            }
            const auto remaining = std::chrono::duration_cast<std::chrono::milliseconds>(deadline - Clock::now());
            if (remaining.count() <= 0) return std::nullopt;
            pollfd pfd{fd, POLLIN, 0};
            const int timeout_ms = static_cast<int>(std::min<long long>(remaining.count(), 1'000'000));
            const int ready = ::poll(&pfd, 1, timeout_ms);
            if (ready < 0) {
                if (errno == EINTR) continue;
                throw EvaluationError(std::string("poll failed: ") + std::strerror(errno));
            }
            if (ready == 0) continue;
            char chunk[4096];
            const ssize_t n = ::recv(fd, chunk, sizeof chunk, 0);
            if (n < 0) {
                if (errno == EINTR) continue;
                throw EvaluationError(std::string("reading from backend failed: ") + std::strerror(errno));
            }
            if (n == 0) throw EvaluationError("backend process exited");
            buffer.append(chunk, static_cast<std::size_t>(n));
        }
    }
};

ExternalBackend::ExternalBackend(ExternalBackendOptions options) : options_(std::move(options)) {
    if (options_.command.empty()) throw ConfigError("external backend needs a command");
}

ExternalBackend::~ExternalBackend() = default;

void ExternalBackend::start() {
    std::lock_guard lock(mutex_);
    spawn();
}

void ExternalBackend::spawn() {
    if (process_) return;

    int fds[2];
    if (::socketpair(AF_UNIX, SOCK_STREAM | SOCK_CLOEXEC, 0, fds) != 0)
        throw EvaluationError(std::string("socketpair failed: ") + std::strerror(errno));

    posix_spawn_file_actions_t actions;
    posix_spawn_file_actions_init(&actions);
    posix_spawn_file_actions_adddup2(&actions, fds[1], STDIN_FILENO);
    posix_spawn_file_actions_adddup2(&actions, fds[1], STDOUT_FILENO);

    std::vector<char*> argv;
    for (auto& arg : options_.command) argv.push_back(arg.data());
    argv.push_back(nullptr);

    pid_t pid = -1;
    const int rc = ::posix_spawnp(&pid, argv[0], &actions, nullptr, argv.data(), environ);
    posix_spawn_file_actions_destroy(&actions);
    ::close(fds[1]);
    if (rc != 0) {
        ::close(fds[0]);
        throw EvaluationError("cannot start backend '" + options_.command.front() + "': " + std::strerror(rc));
    }
    process_ = std::make_unique<Process>();
    process_->pid = pid;
    process_->fd = fds[0];
}

void ExternalBackend::stop() { process_.reset(); }

std::string ExternalBackend::next_request_id() { return "r" + std::to_string(++counter_); }

std::string ExternalBackend::round_trip(const std::string& request_line, std::chrono::milliseconds timeout,
                                        const std::string& what) {
    spawn();
    try {
        process_->write_line(request_line);
        auto line = process_->read_line(Clock::now() + timeout);
        if (!line) {
            stop();
            throw BackendTimeoutError(what + " timed out after " + std::to_string(timeout.count()) + " ms");
        }
        return *line;
    } catch (const BackendTimeoutError&) {
        throw;
    } catch (const EvaluationError& e) {
        stop();
        throw EvaluationError(what + ": " + e.what());
    }
}

namespace {

ordered_json parse_response(const std::string& line, const std::string& request_id, const std::string& what) {
    ordered_json j;
    try {
        j = ordered_json::parse(line);
    } catch (const nlohmann::json::parse_error&) {
        throw ProtocolError(what + ": malformed response '" + line + "'");
    }
    if (!j.is_object()) throw ProtocolError(what + ": response is not an object");
    const auto id = j.find("request_id");
    if (id == j.end() || !id->is_string() || id->get<std::string>() != request_id)
        throw ProtocolError(what + ": response does not echo request_id " + request_id);
    const auto ok = j.find("ok");
    if (ok == j.end() || !ok->is_boolean()) throw ProtocolError(what + ": response lacks boolean 'ok'");
    if (!ok->get<bool>()) {
        const auto err = j.find("error");
        throw EvaluationError(what + " failed: " + (err != j.end() && err->is_string() ? err->get<std::string>() : "unspecified"));
    }
    return j;
}

double metric(const ordered_json& j, const char* key, const std::string& what) {
    const auto it = j.find(key);
    if (it == j.end() || !it->is_number()) throw ProtocolError(what + ": response lacks numeric '" + key + "'");
    const double v = it->get<double>();
    if (!(v >= 0.0 && v <= 1.0)) throw ProtocolError(what + ": '" + key + "' outside [0, 1]");
    return v;
}

} // namespace

void ExternalBackend::pretrain(const DataConfig& data, std::int64_t steps) {
    std::lock_guard lock(mutex_);
    const std::string id = next_request_id();
    ordered_json req{{"op", "pretrain"},
                     {"resolution", data.resolution},
                     {"color", std::string(to_string(data.color))},
                     {"steps", steps},
                     {"request_id", id}};
    const std::string what = "pretrain of " + to_string(data);
    const auto line = round_trip(req.dump(), options_.pretrain_timeout, what);
    parse_response(line, id, what);
}

EvalMetrics ExternalBackend::evaluate(const Candidate& candidate, std::int64_t finetune_steps) {
    std::lock_guard lock(mutex_);
    const std::string id = next_request_id();
    ordered_json req{{"op", "evaluate"},
                     {"candidate", candidate_to_json(candidate)},
                     {"finetune_steps", finetune_steps},
                     {"request_id", id}};
    const std::string what = "evaluate of " + to_string(candidate);
    const auto line = round_trip(req.dump(), options_.evaluate_timeout, what);
    const auto j = parse_response(line, id, what);
    return {metric(j, "accuracy", what), metric(j, "precision", what), metric(j, "recall", what)};
}

} // namespace dnas
