#include <stdio.h>
#include <string.h>

#include "stancegraph.h"

static int check(SgStatus s, const char *what) {
  if (s != SG_STATUS_OK) {
    fprintf(stderr, "%s failed: %d %s\n", what, (int)s, sg_last_error() ? sg_last_error() : "");
    return 1;
  }
  return 0;
}

int main(int argc, char **argv) {
  if (argc != 3) return 2;
  SgStore *store = NULL;
  if (check(sg_store_read(argv[1], &store), "sg_store_read")) return 1;
  size_t hedged = 0, epistemic = 0;
  double ratio = 0;
  if (check(sg_hedging_uncertainty(store, true, &hedged, &epistemic, &ratio), "hedging")) return 1;
  printf("hedging %zu %zu %.6f\n", hedged, epistemic, ratio);
  sg_store_free(store);

  SgAnnotations *ann = NULL;
  if (check(sg_annotations_read(argv[2], &ann), "sg_annotations_read")) return 1;
  double alpha = 0;
  if (check(sg_krippendorff_alpha(ann, &alpha), "alpha")) return 1;
  SgAggregation *agg = NULL;
  if (check(sg_mace_fit(ann, 50, 3, -1.0, 0, &agg), "mace")) return 1;
  size_t items = 0, label = 0;
  double entropy = 0;
  sg_aggregation_item_count(agg, &items);
  sg_aggregation_item(agg, 0, &label, &entropy);
  printf("mace %zu %zu\n", items, label);
  sg_aggregation_free(agg);
  sg_annotations_free(ann);

  double probs[6] = {0.66, 0.34, 0, 0, 0, 0};
  double ef = 0;
  if (check(sg_expected_stance(probs, &ef), "expected")) return 1;
  printf("expected %.2f %s\n", ef, sg_label_name(5));

  SgStore *missing = NULL;
  SgStatus s = sg_store_read("/nonexistent/store.jsonl", &missing);
  printf("missing %d %d\n", (int)s, sg_last_error() != NULL && strlen(sg_last_error()) > 0);
  return 0;
}
