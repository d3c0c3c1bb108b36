#include "quantcert/subprocess_oracle.hpp"

#include <cerrno>
#include <charconv>
#include <chrono>
#include <csignal>
#include <cstring>
#include <mutex>
#include <spawn.h>
#include <sys/wait.h>
#include <thread>
#include <unistd.h>

extern char** environ;

namespace quantcert {

namespace {

void ignore_sigpipe() {
    static std::once_flag once;
    std::call_once(once, [] { std::signal(SIGPIPE, SIG_IGN); });
}

}  // namespace

std::string format_sample_line(std::span<const double> x) {
    std::string line;
    char buf[64];
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (i != 0) line.push_back(',');
        const auto res = std::to_chars(buf, buf + sizeof buf, x[i]);
        line.append(buf, res.ptr);
    }
    line.push_back('\n');
    return line;
}

SubprocessOracle::SubprocessOracle(std::string command, std::shared_ptr<const Sampler> sampler,
                                   std::optional<std::size_t> reference_label)
    : command_(std::move(command)), sampler_(std::move(sampler)), reference_(reference_label) {
    if (!sampler_) {
        throw Error(ErrorCode::out_of_range, "subprocess oracle needs a sampler");
    }
    ignore_sigpipe();

    int in_pipe[2];   // parent -> child stdin
    int out_pipe[2];  // child stdout -> parent
    if (pipe(in_pipe) != 0) {
        throw Error(ErrorCode::spawn_failure, std::string("pipe: ") + std::strerror(errno));
    }
    if (pipe(out_pipe) != 0) {
        close(in_pipe[0]);
        close(in_pipe[1]);
        throw Error(ErrorCode::spawn_failure, std::string("pipe: ") + std::strerror(errno));
    }

    posix_spawn_file_actions_t actions;
    posix_spawn_file_actions_init(&actions);
    posix_spawn_file_actions_adddup2(&actions, in_pipe[0], STDIN_FILENO);
    posix_spawn_file_actions_adddup2(&actions, out_pipe[1], STDOUT_FILENO);
    posix_spawn_file_actions_addclose(&actions, in_pipe[1]);
    posix_spawn_file_actions_addclose(&actions, out_pipe[0]);

    std::string sh = "/bin/sh";
    std::string dash_c = "-c";
    char* argv[] = {sh.data(), dash_c.data(), command_.data(), nullptr};
    const int rc = posix_spawn(&pid_, "/bin/sh", &actions, nullptr, argv, environ);
    posix_spawn_file_actions_destroy(&actions);
    close(in_pipe[0]);
    close(out_pipe[1]);
    if (rc != 0) {
        close(in_pipe[1]);
        close(out_pipe[0]);
        pid_ = -1;
        throw Error(ErrorCode::spawn_failure, "cannot spawn '" + command_ + "': " + std::strerror(rc));
    }
    to_child_ = in_pipe[1];
    from_child_ = out_pipe[0];
}

SubprocessOracle::~SubprocessOracle() {
    shutdown();
}

void SubprocessOracle::shutdown() noexcept {
    if (to_child_ >= 0) {
        close(to_child_);
        to_child_ = -1;
    }
    if (pid_ > 0) {
        int status = 0;
        for (int i = 0; i < 200; ++i) {
            if (waitpid(pid_, &status, WNOHANG) == pid_) {
                pid_ = -1;
                break;
            }
            std::this_thread::sleep_for(std::chrono::milliseconds(5));
        }
        if (pid_ > 0) {
            kill(pid_, SIGKILL);
            waitpid(pid_, &status, 0);
            pid_ = -1;
        }
    }
    if (from_child_ >= 0) {
        close(from_child_);
        from_child_ = -1;
    }
}

void SubprocessOracle::write_all(const std::string& data, const SampleTally& partial) {
    if (dead_) {
        throw OracleError(ErrorCode::child_exit, "oracle process has already exited", partial);
    }
    std::size_t off = 0;
    while (off < data.size()) {
        const ssize_t n = write(to_child_, data.data() + off, data.size() - off);
        if (n < 0) {
            if (errno == EINTR) continue;
            dead_ = true;
            throw OracleError(ErrorCode::child_exit,
                              std::string("oracle process stopped reading: ") + std::strerror(errno), partial);
        }
        off += static_cast<std::size_t>(n);
    }
}

std::size_t SubprocessOracle::read_label(const SampleTally& partial) {
    std::size_t eol;
    while ((eol = read_buffer_.find('\n')) == std::string::npos) {
        char buf[4096];
        const ssize_t n = read(from_child_, buf, sizeof buf);
        if (n < 0 && errno == EINTR) continue;
        if (n <= 0) {
            dead_ = true;
            throw OracleError(ErrorCode::child_exit, "oracle process exited before answering every input", partial);
        }
        read_buffer_.append(buf, static_cast<std::size_t>(n));
    }
    std::string_view line(read_buffer_.data(), eol);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    std::size_t label = 0;
    const auto res = std::from_chars(line.data(), line.data() + line.size(), label);
    if (line.empty() || res.ec != std::errc() || res.ptr != line.data() + line.size()) {
        const std::string bad(line);
        read_buffer_.erase(0, eol + 1);
        throw OracleError(ErrorCode::protocol_violation, "malformed label line '" + bad + "'", partial);
    }
    read_buffer_.erase(0, eol + 1);
    return label;
}

SampleTally SubprocessOracle::draw(const TrialBatch& batch, const SeedSpec& seed) {
    std::lock_guard lock(mu_);
    if (!reference_) {
        throw OracleError(ErrorCode::oracle_failure, "subprocess oracle has no reference label", SampleTally());
    }
    std::vector<double> x(sampler_->dimension());
    std::uint64_t done = 0;
    std::uint64_t hits = 0;
    std::string payload;
    while (done < batch.count) {
        const std::uint64_t chunk = std::min<std::uint64_t>(chunk_lines, batch.count - done);
        payload.clear();
        for (std::uint64_t i = 0; i < chunk; ++i) {
            sampler_->sample(batch.call_index, batch.first_trial + done + i, seed, x);
            payload += format_sample_line(x);
        }
        write_all(payload, SampleTally(done, hits));
        for (std::uint64_t i = 0; i < chunk; ++i) {
            const std::size_t label = read_label(SampleTally(done, hits));
            hits += label != *reference_ ? 1 : 0;
            ++done;
        }
    }
    return SampleTally(batch.count, hits);
}

std::size_t SubprocessOracle::classify(std::span<const double> x) {
    std::lock_guard lock(mu_);
    if (x.size() != sampler_->dimension()) {
        throw Error(ErrorCode::dimension_mismatch, "classify input does not match the sampler dimension");
    }
    write_all(format_sample_line(x), SampleTally());
    return read_label(SampleTally());
}

void SubprocessOracle::set_reference_from(std::span<const double> x) {
    const std::size_t label = classify(x);
    std::lock_guard lock(mu_);
    reference_ = label;
}

std::string SubprocessOracle::description() const {
    return "subprocess '" + command_ + "' over " + sampler_->description();
}

std::unique_ptr<SubprocessOracle> subprocess_oracle(std::string command, std::shared_ptr<const Sampler> sampler,
                                                    std::optional<std::size_t> reference_label) {
    return std::make_unique<SubprocessOracle>(std::move(command), std::move(sampler), reference_label);
}

}  // namespace quantcert
