#pragma once

#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "invgae/common.hpp"
#include "invgae/tensor.hpp"

namespace invgae {

// All trainable tensors of a model, addressable by name. Iteration order is
// insertion order (deterministic).
class ParameterStore {
public:
    Tensor& add(std::string name, Tensor value) {
        auto [it, inserted] = index_.try_emplace(name, tensors_.size());
        if (!inserted) throw ConfigError("ParameterStore: duplicate parameter '" + name + "'");
        order_.push_back(std::move(name));
        tensors_.push_back(std::move(value));
        return tensors_.back();
    }

    bool contains(std::string_view name) const { return index_.count(std::string(name)) > 0; }

    Tensor& get(std::string_view name) {
        auto it = index_.find(std::string(name));
        if (it == index_.end())
            throw ConfigError("ParameterStore: unknown parameter '" + std::string(name) + "'");
        return tensors_[it->second];
    }
    const Tensor& get(std::string_view name) const {
        return const_cast<ParameterStore*>(this)->get(name);
    }

    const std::vector<std::string>& names() const { return order_; }
    std::size_t size() const { return order_.size(); }

    std::size_t total_entries() const {
        std::size_t n = 0;
        for (const auto& t : tensors_) n += t.size();
        return n;
    }

private:
    std::vector<std::string> order_;
    std::vector<Tensor> tensors_;
    std::unordered_map<std::string, std::size_t> index_;
};

}  // namespace invgae
