#pragma once

#include <filesystem>
#include <memory>
#include <string>

namespace httplib {
class Server;
}

namespace bpsim {

struct ServiceOptions {
    std::filesystem::path state_dir = "bpsim-state";
    std::size_t workers = 0;  // 0: one per hardware thread
};

/// Scenario store and run queue behind the /api/v1 endpoints. State lives
/// in plain files under the state directory and survives restarts; runs
/// that were queued or running when the service stopped are queued again.
class Service {
public:
    explicit Service(ServiceOptions options);
    ~Service();
    Service(const Service&) = delete;
    Service& operator=(const Service&) = delete;

    /// Registers routes, CORS headers and error handling on `server`.
    void mount(httplib::Server& server);

    /// Blocks until no run is pending or running.
    void wait_idle();

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

/// Runs the service on `port` until the process is stopped. Returns
/// nonzero when the port cannot be bound.
int serve(const std::string& host, int port, ServiceOptions options);

}  // namespace bpsim
