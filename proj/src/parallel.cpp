#include "sdf/parallel.hpp"

namespace sdf {

WorkerPool::WorkerPool(std::size_t threads) {
    for (std::size_t i = 1; i < threads; ++i) workers_.emplace_back([this] { worker_loop(); });
}

WorkerPool::~WorkerPool() {
    {
        std::lock_guard lock(mutex_);
        stop_ = true;
    }
    work_ready_.notify_all();
    for (auto& t : workers_) t.join();
}

void WorkerPool::drain() {
    for (;;) {
        std::size_t i = 0;
        {
            std::lock_guard lock(mutex_);
            if (next_ >= count_) return;
            i = next_++;
        }
        try {
            (*body_)(i);
        } catch (...) {
            std::lock_guard lock(mutex_);
            if (!error_) error_ = std::current_exception();
        }
        std::lock_guard lock(mutex_);
        if (--pending_ == 0) work_done_.notify_all();
    }
}

void WorkerPool::worker_loop() {
    std::size_t seen = 0;
    for (;;) {
        {
            std::unique_lock lock(mutex_);
            work_ready_.wait(lock, [&] { return stop_ || generation_ != seen; });
            if (stop_) return;
            seen = generation_;
        }
        drain();
    }
}

void WorkerPool::parallel_for(std::size_t n, const std::function<void(std::size_t)>& body) {
    if (workers_.empty() || n <= 1) {
        for (std::size_t i = 0; i < n; ++i) body(i);
        return;
    }
    {
        std::lock_guard lock(mutex_);
        body_ = &body;
        next_ = 0;
        count_ = n;
        pending_ = n;
        error_ = nullptr;
        ++generation_;
    }
    work_ready_.notify_all();
    drain();
    std::unique_lock lock(mutex_);
    work_done_.wait(lock, [&] { return pending_ == 0; });
    body_ = nullptr;
    if (error_) std::rethrow_exception(error_);
}

}  // namespace sdf
