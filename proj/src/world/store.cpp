#include "icsim/world/store.hpp"

namespace icsim::world {

std::uint64_t fnv1a(std::string_view text) {
    std::uint64_t hash = 0xCBF29CE484222325ull;
    for (char c : text) {
        hash ^= static_cast<unsigned char>(c);
        hash *= 0x100000001B3ull;
    }
    return hash;
}

namespace {

void require_writer(WriterRole writer) {
    if (writer != WriterRole::hil && writer != WriterRole::actuator) {
        throw WriterNotPermitted("only actuators and the physics step may write the store");
    }
}

}  // namespace

void PhysicalStore::declare(const std::string& name, double initial) {
    std::lock_guard lock(mutex_);
    values_[name] = initial;
}

bool PhysicalStore::declared(const std::string& name) const {
    std::lock_guard lock(mutex_);
    return values_.count(name) != 0;
}

double PhysicalStore::read(const std::string& name) const {
    std::lock_guard lock(mutex_);
    auto it = values_.find(name);
    if (it == values_.end()) throw UnknownPhysicalValue(name);
    return it->second;
}

std::uint64_t PhysicalStore::commit_locked(const std::string& name, double value,
                                           double sim_time_s) {
    auto it = values_.find(name);
    if (it == values_.end()) throw UnknownPhysicalValue(name);
    it->second = value;
    ++revision_;
    if (journal_) journal_({sim_time_s, revision_, name, value});
    return revision_;
}

std::uint64_t PhysicalStore::write(const std::string& name, double value, WriterRole writer,
                                   double sim_time_s) {
    require_writer(writer);
    std::lock_guard lock(mutex_);
    return commit_locked(name, value, sim_time_s);
}

std::uint64_t PhysicalStore::apply_batch(
    std::span<const std::pair<std::string, double>> updates, WriterRole writer,
    double sim_time_s) {
    require_writer(writer);
    std::lock_guard lock(mutex_);
    for (const auto& [name, value] : updates) {
        if (values_.count(name) == 0) throw UnknownPhysicalValue(name);
    }
    for (const auto& [name, value] : updates) {
        commit_locked(name, value, sim_time_s);
    }
    return revision_;
}

std::uint64_t PhysicalStore::revision() const {
    std::lock_guard lock(mutex_);
    return revision_;
}

std::map<std::string, double> PhysicalStore::snapshot() const {
    std::lock_guard lock(mutex_);
    return values_;
}

}  // namespace icsim::world
