// SPDX-License-Identifier: Apache-2.0
#include "curvelane/evaluator.hpp"

#include <algorithm>
#include <cerrno>
#include <cmath>
#include <csignal>
#include <cstring>
#include <mutex>
#include <thread>

#include <fcntl.h>
#include <poll.h>
#include <spawn.h>
#include <sys/wait.h>
#include <unistd.h>

#include "curvelane/data_io.hpp"
#include "curvelane/errors.hpp"

extern char** environ;

namespace curvelane {

double synthetic_score(const ArchEncoding& arch, Resolution resolution)
{
    double depth = 0.0;
    for (const auto& b : stage_layout(arch.backbone)) {
        depth += b.stage - 1;
    }
    const double max_depth = static_cast<double>(kMaxBlocks) * 3.0;
    const double receptive = std::min(depth / max_depth, 1.0);

    const int earliest = *std::min_element(arch.fusion.heads_at.begin(), arch.fusion.heads_at.end());
    const double head_resolution = 1.0 - (earliest - 1) / 3.0;

    const double x = std::log1p(static_cast<double>(candidate_cost(arch, resolution).total_params) / 1e6);
    const double capacity = x / (1.0 + x);

    return std::clamp(0.4 * receptive + 0.3 * head_resolution + 0.3 * capacity, 0.0, 1.0);
}

double SyntheticEvaluator::evaluate(const ArchEncoding& arch, const EvalContext& ctx) const
{
    return synthetic_score(arch, ctx.resolution);
}

ExternalEvaluator::ExternalEvaluator(std::string command, std::chrono::milliseconds timeout, bool deterministic)
    : command_(std::move(command)), timeout_(timeout), deterministic_(deterministic)
{
}

namespace {

class Fd {
public:
    Fd() = default;
    explicit Fd(int fd) : fd_(fd) {}
    Fd(const Fd&) = delete;
    Fd& operator=(const Fd&) = delete;
    ~Fd() { reset(); }

    int get() const { return fd_; }
    void reset()
    {
        if (fd_ >= 0) {
            ::close(fd_);
        }
        fd_ = -1;
    }

private:
    int fd_ = -1;
};

void ignore_sigpipe()
{
    static std::once_flag once;
    std::call_once(once, [] { std::signal(SIGPIPE, SIG_IGN); });
}

std::string errno_text(const char* what)
{
    return std::string(what) + ": " + std::strerror(errno);
}

void kill_group(pid_t pid)
{
    ::kill(-pid, SIGKILL);
    int status = 0;
    while (::waitpid(pid, &status, 0) < 0 && errno == EINTR) {
    }
}

} // namespace

double ExternalEvaluator::evaluate(const ArchEncoding& arch, const EvalContext& ctx) const
{
    using Clock = std::chrono::steady_clock;
    ignore_sigpipe();
    const auto deadline = Clock::now() + timeout_;

    int in_pipe[2];
    int out_pipe[2];
    if (::pipe2(in_pipe, O_CLOEXEC) != 0) {
        throw SpawnError(ctx.eval_id, errno_text("pipe"));
    }
    Fd child_in(in_pipe[0]);
    Fd to_child(in_pipe[1]);
    if (::pipe2(out_pipe, O_CLOEXEC) != 0) {
        throw SpawnError(ctx.eval_id, errno_text("pipe"));
    }
    Fd from_child(out_pipe[0]);
    Fd child_out(out_pipe[1]);

    posix_spawn_file_actions_t actions;
    posix_spawn_file_actions_init(&actions);
    posix_spawn_file_actions_adddup2(&actions, child_in.get(), STDIN_FILENO);
    posix_spawn_file_actions_adddup2(&actions, child_out.get(), STDOUT_FILENO);
    posix_spawnattr_t attr;
    posix_spawnattr_init(&attr);
    sigset_t defaults;
    sigemptyset(&defaults);
    sigaddset(&defaults, SIGPIPE);
    posix_spawnattr_setsigdefault(&attr, &defaults);
    posix_spawnattr_setpgroup(&attr, 0);
    posix_spawnattr_setflags(&attr, POSIX_SPAWN_SETPGROUP | POSIX_SPAWN_SETSIGDEF);

    std::string shell = "/bin/sh";
    std::string dash_c = "-c";
    std::string command = command_;
    char* argv[] = {shell.data(), dash_c.data(), command.data(), nullptr};
    pid_t pid = 0;
    const int rc = ::posix_spawn(&pid, shell.c_str(), &actions, &attr, argv, environ);
    posix_spawn_file_actions_destroy(&actions);
    posix_spawnattr_destroy(&attr);
    if (rc != 0) {
        throw SpawnError(ctx.eval_id, std::string("posix_spawn: ") + std::strerror(rc));
    }
    child_in.reset();
    child_out.reset();

    io::EvalRequest request{ctx.eval_id, arch, ctx.resolution};
    const std::string line = io::to_json(request).dump() + "\n";
    std::size_t written = 0;
    while (written < line.size()) {
        const ssize_t n = ::write(to_child.get(), line.data() + written, line.size() - written);
        if (n < 0) {
            if (errno == EINTR) {
                continue;
            }
            break; // the child closed stdin; its exit status tells the rest
        }
        written += static_cast<std::size_t>(n);
    }
    to_child.reset();

    std::string response;
    char buf[4096];
    for (;;) {
        const auto left = std::chrono::duration_cast<std::chrono::milliseconds>(deadline - Clock::now()).count();
        if (left <= 0) {
            kill_group(pid);
            throw TimeoutError(ctx.eval_id, "no response within " + std::to_string(timeout_.count()) + " ms");
        }
        pollfd pfd{from_child.get(), POLLIN, 0};
        const int ready = ::poll(&pfd, 1, static_cast<int>(std::min<long long>(left, 1000)));
        if (ready < 0 && errno != EINTR) {
            kill_group(pid);
            throw EvaluatorError(ctx.eval_id, errno_text("poll"));
        }
        if (ready <= 0) {
            continue;
        }
        const ssize_t n = ::read(from_child.get(), buf, sizeof(buf));
        if (n < 0 && errno == EINTR) {
            continue;
        }
        if (n <= 0) {
            break;
        }
        response.append(buf, static_cast<std::size_t>(n));
    }
    from_child.reset();

    int status = 0;
    for (;;) {
        const pid_t r = ::waitpid(pid, &status, WNOHANG);
        if (r == pid) {
            break;
        }
        if (r < 0 && errno != EINTR) {
            throw EvaluatorError(ctx.eval_id, errno_text("waitpid"));
        }
        if (Clock::now() >= deadline) {
            kill_group(pid);
            throw TimeoutError(ctx.eval_id, "evaluator did not exit within " + std::to_string(timeout_.count()) + " ms");
        }
        std::this_thread::sleep_for(std::chrono::milliseconds(2));
    }
    if (WIFSIGNALED(status)) {
        throw EvaluatorError(ctx.eval_id, "killed by signal " + std::to_string(WTERMSIG(status)));
    }
    if (WEXITSTATUS(status) != 0) {
        throw EvaluatorError(ctx.eval_id, "exit status " + std::to_string(WEXITSTATUS(status)));
    }
    try {
        return io::parse_eval_response(response, ctx.eval_id).score;
    } catch (const SchemaError& e) {
        throw ProtocolError(ctx.eval_id, e.what());
    }
}

ReplayEvaluator::ReplayEvaluator(std::vector<kernels::BlendSample> samples, MatchOptions options)
    : samples_(std::move(samples)), options_(options)
{
    if (samples_.empty()) {
        throw EmptyDatasetError("replay evaluation needs at least one scene");
    }
}

double ReplayEvaluator::evaluate(const ArchEncoding& arch, const EvalContext&) const
{
    SceneCounts total;
    for (const auto& c : kernels::score_corpus_serial(samples_, arch.blend, options_)) {
        total += c;
    }
    return f1_score(total);
}

} // namespace curvelane
