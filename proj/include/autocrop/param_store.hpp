#pragma once

#include <map>
#include <string>

#include "autocrop/tensor.hpp"

namespace autocrop {

// Named parameter tensors. Serialized as float32 little-endian; save() snaps
// the in-memory doubles to their float32 values first so that
// save -> load -> save is byte-identical.
class ParamStore {
public:
    static constexpr const char* kMagic = "ABPAA001";

    bool contains(const std::string& name) const { return entries_.count(name) != 0; }

    Tensor& at(const std::string& name) {
        auto it = entries_.find(name);
        if (it == entries_.end()) throw std::out_of_range("ParamStore: no entry '" + name + "'");
        return it->second;
    }
    const Tensor& at(const std::string& name) const {
        auto it = entries_.find(name);
        if (it == entries_.end()) throw std::out_of_range("ParamStore: no entry '" + name + "'");
        return it->second;
    }

    void insert(const std::string& name, Tensor t) {
        if (!entries_.emplace(name, std::move(t)).second) {
            throw std::invalid_argument("ParamStore: duplicate entry '" + name + "'");
        }
    }

    std::map<std::string, Tensor>& entries() { return entries_; }
    const std::map<std::string, Tensor>& entries() const { return entries_; }
    std::size_t size() const { return entries_.size(); }

    // Rounds every value to its nearest float32.
    void snap_to_float32();

    void save(const std::string& path) const;
    static ParamStore load(const std::string& path);

private:
    std::map<std::string, Tensor> entries_;
};

}  // namespace autocrop
