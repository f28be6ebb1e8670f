#include <stdio.h>
#include "incr_pagerank.h"

#define CHECK(call)                                                      \
    do {                                                                 \
        IprStatus s_ = (call);                                           \
        if (s_ != IPR_STATUS_OK) {                                       \
            fprintf(stderr, "%s: %s\n", #call, ipr_status_message(s_)); \
            return 1;                                                    \
        }                                                                \
    } while (0)

int main(void) {
    IprScript *script = NULL;
    IprRunSummary run;
    CHECK(ipr_script_build_binary(256, &script));
    CHECK(ipr_replay(script, 10, 0.2, 1, &run));
    printf("N=256 m=%llu reroutes=%llu predicted_toprow=%.1f\n",
           (unsigned long long)run.edge_count,
           (unsigned long long)run.reroutes_total,
           ipr_predicted_total(10, 256, 0.2, 2));
    ipr_script_free(script);

    IprGraph *g = NULL;
    IprWalkStore *store = NULL;
    double scores[3];
    CHECK(ipr_graph_new(3, &g));
    CHECK(ipr_store_new(g, 100, 0.2, 5, &store));
    CHECK(ipr_graph_add_edge(g, 0, 1, NULL));
    CHECK(ipr_store_on_edge_arrival(store, g, 0, 1, NULL));
    CHECK(ipr_store_estimate(store, scores, 3));
    printf("scores %.3f %.3f %.3f\n", scores[0], scores[1], scores[2]);
    ipr_store_free(store);
    ipr_graph_free(g);
    return 0;
}
