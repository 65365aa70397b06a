#pragma once

#include <condition_variable>
#include <cstddef>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace sdf {

// Fixed set of worker threads running index-parallel loops. With one thread
// the loop runs inline on the caller.
class WorkerPool {
public:
    explicit WorkerPool(std::size_t threads);
    ~WorkerPool();
    WorkerPool(const WorkerPool&) = delete;
    WorkerPool& operator=(const WorkerPool&) = delete;

    std::size_t threads() const noexcept { return workers_.size() + 1; }

    // Runs body(i) for i in [0, n) and returns when all calls finished.
    // The first exception thrown by a body is rethrown here.
    void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

private:
    void worker_loop();
    void drain();

    std::vector<std::thread> workers_;
    std::mutex mutex_;
    std::condition_variable work_ready_;
    std::condition_variable work_done_;
    const std::function<void(std::size_t)>* body_ = nullptr;
    std::size_t next_ = 0;
    std::size_t count_ = 0;
    std::size_t pending_ = 0;
    std::size_t generation_ = 0;
    bool stop_ = false;
    std::exception_ptr error_;
};

}  // namespace sdf
