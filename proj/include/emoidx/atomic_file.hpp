#pragma once

#include <filesystem>
#include <fstream>
#include <string_view>

namespace emoidx {

// Writes to a sibling temporary file and renames it over the target on
// commit(). If destroyed without commit() the temporary file is removed, so a
// failed run never leaves a partial output behind.
class AtomicFile {
public:
    explicit AtomicFile(std::filesystem::path target);
    ~AtomicFile();
    AtomicFile(const AtomicFile&) = delete;
    AtomicFile& operator=(const AtomicFile&) = delete;

    std::ofstream& stream() { return out_; }
    void commit();

private:
    std::filesystem::path target_;
    std::filesystem::path temp_;
    std::ofstream out_;
    bool committed_ = false;
};

void write_file_atomic(const std::filesystem::path& target, std::string_view content);

} // namespace emoidx
