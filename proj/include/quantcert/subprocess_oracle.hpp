#pragma once

#include <cstddef>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <sys/types.h>

#include "quantcert/oracle.hpp"

namespace quantcert {

/// Oracle backed by an external classifier process.
///
/// Wire protocol (line oriented, UTF-8): the parent writes one sample per
/// line as comma-separated decimal floats in shortest round-trip form; the
/// child answers each input line with one non-negative integer label on its
/// own line, in order. The parent flushes after every chunk and closes the
/// child's stdin to ask it to shut down. A trial succeeds when the returned
/// label differs from the reference label.
///
/// Draws are serialized over the single pipe pair.
class SubprocessOracle final : public Oracle {
public:
    /// Runs `command` through /bin/sh -c. Without a reference label,
    /// set_reference_from() must be called before the first draw().
    SubprocessOracle(std::string command, std::shared_ptr<const Sampler> sampler,
                     std::optional<std::size_t> reference_label = std::nullopt);
    ~SubprocessOracle() override;

    SubprocessOracle(const SubprocessOracle&) = delete;
    SubprocessOracle& operator=(const SubprocessOracle&) = delete;

    SampleTally draw(const TrialBatch& batch, const SeedSpec& seed) override;
    bool concurrent_draws() const noexcept override { return false; }
    std::string description() const override;

    /// One round trip for a single input.
    std::size_t classify(std::span<const double> x);

    /// Classifies x and uses the answer as the reference label.
    void set_reference_from(std::span<const double> x);
    std::optional<std::size_t> reference_label() const noexcept { return reference_; }

    static constexpr std::size_t chunk_lines = 256;

private:
    void write_all(const std::string& data, const SampleTally& partial);
    std::size_t read_label(const SampleTally& partial);
    void shutdown() noexcept;

    std::string command_;
    std::shared_ptr<const Sampler> sampler_;
    std::optional<std::size_t> reference_;
    pid_t pid_ = -1;
    int to_child_ = -1;
    int from_child_ = -1;
    bool dead_ = false;
    std::string read_buffer_;
    std::mutex mu_;
};

std::unique_ptr<SubprocessOracle> subprocess_oracle(std::string command, std::shared_ptr<const Sampler> sampler,
                                                    std::optional<std::size_t> reference_label = std::nullopt);

/// Shortest round-trip decimal rendering of a sample, comma separated.
std::string format_sample_line(std::span<const double> x);

}  // namespace quantcert
