#pragma once

#include <vector>

namespace lcrl::detail {

// Iterative Tarjan. Components are numbered in reverse topological order
// (every edge goes from a component to one with an equal or smaller id).
struct SccResult {
    std::vector<int> comp;                    // node -> component id
    std::vector<std::vector<int>> members;    // component id -> nodes
};

inline SccResult tarjan_scc(const std::vector<std::vector<int>>& adj) {
    const int n = static_cast<int>(adj.size());
    SccResult res;
    res.comp.assign(n, -1);

    std::vector<int> index(n, -1), lowlink(n, 0), stack;
    std::vector<char> on_stack(n, 0);
    int next_index = 0;

    struct Frame {
        int v;
        std::size_t child;
    };
    std::vector<Frame> call;

    for (int root = 0; root < n; ++root) {
        if (index[root] != -1) continue;
        call.push_back({root, 0});
        while (!call.empty()) {
            Frame& f = call.back();
            const int v = f.v;
            if (f.child == 0) {
                index[v] = lowlink[v] = next_index++;
                stack.push_back(v);
                on_stack[v] = 1;
            }
            bool descended = false;
            while (f.child < adj[v].size()) {
                const int w = adj[v][f.child++];
                if (index[w] == -1) {
                    call.push_back({w, 0});
                    descended = true;
                    break;
                }
                if (on_stack[w] && index[w] < lowlink[v]) lowlink[v] = index[w];
            }
            if (descended) continue;
            if (lowlink[v] == index[v]) {
                std::vector<int> comp;
                int w;
                do {
                    w = stack.back();
                    stack.pop_back();
                    on_stack[w] = 0;
                    res.comp[w] = static_cast<int>(res.members.size());
                    comp.push_back(w);
                } while (w != v);
                res.members.push_back(std::move(comp));
            }
            call.pop_back();
            if (!call.empty()) {
                Frame& parent = call.back();
                if (lowlink[v] < lowlink[parent.v]) lowlink[parent.v] = lowlink[v];
            }
        }
    }
    return res;
}

}  // namespace lcrl::detail
