#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <mutex>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>

namespace icsim::world {

class UnknownPhysicalValue : public std::runtime_error {
  public:
    explicit UnknownPhysicalValue(const std::string& name)
        : std::runtime_error("unknown physical value: " + name) {}
};

class WriterNotPermitted : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

// Who is committing a write. Only the physics step and actuators may mutate
// the store; sensors and everything else are read-only.
enum class WriterRole {
    hil,
    actuator,
    sensor,
    other,
};

// One committed write, as seen by the journal.
struct StoreCommit {
    double sim_time_s;
    std::uint64_t revision;
    std::string name;
    double value;
};

// Shared physical-value store. Every name is declared up front by exactly one
// HIL device; writes are serialized internally and bump a revision counter.
class PhysicalStore {
  public:
    using JournalSink = std::function<void(const StoreCommit&)>;

    void declare(const std::string& name, double initial);
    bool declared(const std::string& name) const;

    double read(const std::string& name) const;

    std::uint64_t write(const std::string& name, double value, WriterRole writer,
                        double sim_time_s);

    // Applies all updates under one lock so no reader sees a half-applied
    // physics step. Revision still bumps once per value.
    std::uint64_t apply_batch(std::span<const std::pair<std::string, double>> updates,
                              WriterRole writer, double sim_time_s);

    std::uint64_t revision() const;
    std::map<std::string, double> snapshot() const;

    void set_journal(JournalSink sink) { journal_ = std::move(sink); }

  private:
    std::uint64_t commit_locked(const std::string& name, double value, double sim_time_s);

    mutable std::mutex mutex_;
    std::map<std::string, double> values_;
    std::uint64_t revision_ = 0;
    JournalSink journal_;
};

}  // namespace icsim::world
