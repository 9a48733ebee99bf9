#pragma once

#include <functional>
#include <map>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "qnic/core/errors.hpp"
#include "qnic/core/random.hpp"
#include "qnic/protostack/report.hpp"

namespace qnic {

enum class TaskKind { Sign, ShareSecret, Key };
enum class Direction { Forward, Backward };

inline std::string to_string(TaskKind t) {
    switch (t) {
    case TaskKind::Sign: return "sign";
    case TaskKind::ShareSecret: return "share-secret";
    default: return "key";
    }
}

inline std::string to_string(Direction d) { return d == Direction::Forward ? "forward" : "backward"; }

struct TaskRequest {
    TaskKind task = TaskKind::Sign;
    Direction direction = Direction::Backward;
    double epsilon_fail = 1e-4;
    std::vector<std::uint8_t> message;
    std::vector<std::uint8_t> secret;
};

/// What the node hardware offers to the layer above.
struct HardwareCapabilities {
    bool forward = true;    // can send coherent states
    bool backward = true;   // can receive and heterodyne
    std::string detection = "heterodyne";
};

struct SessionConfig;

/// A protocol application as seen by the middleware.
class ProtocolApp {
public:
    virtual ~ProtocolApp() = default;
    virtual std::string id() const = 0;
    virtual TaskKind task() const = 0;
    virtual Direction direction() const = 0;
    virtual ProtocolReport run(const SessionConfig& cfg, SeededRandomSource& rng) const = 0;
};

class ProtocolRegistry {
public:
    using Factory = std::function<std::unique_ptr<ProtocolApp>()>;

    void add(TaskKind t, Direction d, Factory f) { table_[{t, d}] = std::move(f); }

    std::unique_ptr<ProtocolApp> dispatch(const TaskRequest& req, const HardwareCapabilities& caps) const {
        if (!(req.epsilon_fail > 0.0 && req.epsilon_fail < 1.0)) throw DomainError("dispatch: epsilon must lie in (0,1)");
        const auto it = table_.find({req.task, req.direction});
        if (it == table_.end())
            throw UnsupportedTask("no protocol registered for " + to_string(req.task) + "/" + to_string(req.direction));
        if (caps.detection != "heterodyne") throw UnsupportedTask("hardware lacks heterodyne detection");
        if ((req.direction == Direction::Forward && !caps.forward) || (req.direction == Direction::Backward && !caps.backward))
            throw UnsupportedTask("hardware does not support the " + to_string(req.direction) + " configuration");
        return it->second();
    }

    std::vector<std::pair<TaskKind, Direction>> entries() const {
        std::vector<std::pair<TaskKind, Direction>> out;
        for (const auto& [k, v] : table_) out.push_back(k);
        return out;
    }

private:
    std::map<std::pair<TaskKind, Direction>, Factory> table_;
};

} // namespace qnic
