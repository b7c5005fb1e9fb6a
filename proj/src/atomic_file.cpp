#include "emoidx/atomic_file.hpp"

#include <atomic>
#include <system_error>

#include <unistd.h>

#include "emoidx/error.hpp"

namespace emoidx {

namespace {
std::atomic<unsigned> temp_serial{0};
}

AtomicFile::AtomicFile(std::filesystem::path target) : target_(std::move(target)) {
    temp_ = target_;
    temp_ += ".tmp." + std::to_string(::getpid()) + "." + std::to_string(temp_serial++);
    out_.open(temp_, std::ios::binary | std::ios::trunc);
    if (!out_) throw DataError("cannot write " + target_.string());
}

AtomicFile::~AtomicFile() {
    if (!committed_) {
        out_.close();
        std::error_code ec;
        std::filesystem::remove(temp_, ec);
    }
}

void AtomicFile::commit() {
    out_.flush();
    if (!out_) throw DataError("write failed for " + target_.string());
    out_.close();
    std::error_code ec;
    std::filesystem::rename(temp_, target_, ec);
    if (ec) throw DataError("cannot move output into place at " + target_.string() + ": " + ec.message());
    committed_ = true;
}

void write_file_atomic(const std::filesystem::path& target, std::string_view content) {
    AtomicFile f(target);
    f.stream().write(content.data(), static_cast<std::streamsize>(content.size()));
    f.commit();
}

} // namespace emoidx
