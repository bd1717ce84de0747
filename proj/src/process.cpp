#include "mgen/process.hpp"

#include "mgen/error.hpp"

#include <cerrno>
#include <csignal>
#include <cstring>
#include <algorithm>
#include <utility>

extern "C" {
#include <fcntl.h>
#include <poll.h>
#include <sys/wait.h>
#include <unistd.h>
}

namespace mgen {

namespace {

class Fd {
public:
    Fd() = default;
    explicit Fd(int fd) : fd_(fd) {}
    Fd(const Fd&) = delete;
    Fd& operator=(const Fd&) = delete;
    Fd(Fd&& other) noexcept : fd_(other.release()) {}
    Fd& operator=(Fd&& other) noexcept {
        if (this != &other) {
            reset();
            fd_ = other.release();
        }
        return *this;
    }
    ~Fd() { reset(); }

    [[nodiscard]] int get() const noexcept { return fd_; }
    int release() noexcept { return std::exchange(fd_, -1); }
    void reset() noexcept {
        if (fd_ >= 0) ::close(fd_);
        fd_ = -1;
    }

private:
    int fd_ = -1;
};

std::pair<Fd, Fd> make_pipe() {
    int fds[2];
    if (::pipe2(fds, O_CLOEXEC) != 0) {
        throw Error(ErrorCode::AdapterSpawnFailure, std::string("pipe: ") + std::strerror(errno));
    }
    return {Fd(fds[0]), Fd(fds[1])};
}

}  // namespace

ProcessResult run_process(const std::vector<std::string>& argv,
                          const std::filesystem::path& cwd,
                          std::chrono::milliseconds timeout) {
    if (argv.empty()) throw Error(ErrorCode::AdapterSpawnFailure, "empty command");

    std::vector<char*> cargv;
    cargv.reserve(argv.size() + 1);
    for (const auto& a : argv) cargv.push_back(const_cast<char*>(a.c_str()));
    cargv.push_back(nullptr);
    const std::string dir = cwd.string();

    auto [out_r, out_w] = make_pipe();
    // Reports exec failure (errno) back to the parent; closed on successful exec.
    auto [err_r, err_w] = make_pipe();

    const auto start = std::chrono::steady_clock::now();
    const pid_t pid = ::fork();
    if (pid < 0) {
        throw Error(ErrorCode::AdapterSpawnFailure, std::string("fork: ") + std::strerror(errno));
    }
    if (pid == 0) {
        ::setpgid(0, 0);
        ::dup2(out_w.get(), STDOUT_FILENO);
        ::dup2(out_w.get(), STDERR_FILENO);
        int devnull = ::open("/dev/null", O_RDONLY);
        if (devnull >= 0) ::dup2(devnull, STDIN_FILENO);
        if (::chdir(dir.c_str()) == 0) ::execvp(cargv[0], cargv.data());
        int e = errno;
        [[maybe_unused]] auto n = ::write(err_w.get(), &e, sizeof e);
        ::_exit(127);
    }
    ::setpgid(pid, pid);
    out_w.reset();
    err_w.reset();

    int exec_errno = 0;
    if (::read(err_r.get(), &exec_errno, sizeof exec_errno) == sizeof exec_errno) {
        ::waitpid(pid, nullptr, 0);
        throw Error(ErrorCode::AdapterSpawnFailure,
                    "cannot execute '" + argv.front() + "': " + std::strerror(exec_errno));
    }

    ProcessResult result;
    const auto deadline = start + timeout;
    bool open = true;
    char buf[4096];
    while (open) {
        const auto now = std::chrono::steady_clock::now();
        if (now >= deadline) {
            result.timed_out = true;
            break;
        }
        const auto left = std::chrono::duration_cast<std::chrono::milliseconds>(deadline - now);
        pollfd pfd{out_r.get(), POLLIN, 0};
        const int rc = ::poll(&pfd, 1, static_cast<int>(std::min<long long>(left.count() + 1, 1000)));
        if (rc < 0 && errno != EINTR) break;
        if (rc <= 0) continue;
        const ssize_t n = ::read(out_r.get(), buf, sizeof buf);
        if (n > 0) {
            result.output.append(buf, static_cast<std::size_t>(n));
        } else if (n == 0 || errno != EINTR) {
            open = false;
        }
    }

    int status = 0;
    if (result.timed_out) {
        ::kill(-pid, SIGKILL);
        ::waitpid(pid, &status, 0);
        result.exit_code = -1;
    } else {
        // Output closed; the child may still be running with a closed stdout.
        while (true) {
            const pid_t w = ::waitpid(pid, &status, WNOHANG);
            if (w == pid) break;
            if (std::chrono::steady_clock::now() >= deadline) {
                ::kill(-pid, SIGKILL);
                ::waitpid(pid, &status, 0);
                result.timed_out = true;
                break;
            }
            ::usleep(2000);
        }
        if (!result.timed_out) {
            result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
        }
    }
    result.duration = std::chrono::duration_cast<std::chrono::milliseconds>(
        std::chrono::steady_clock::now() - start);
    return result;
}

}  // namespace mgen
