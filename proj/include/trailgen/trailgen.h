/* trailgen C API: synthetic multi-hop task generation, agent rollout,
 * trajectory filtering and SFT export over a simulated search world.
 *
 * All functions return a trailgen_status; non-zero means failure and
 * trailgen_last_error() carries a message for the calling thread. Output
 * handles are only valid on TRAILGEN_OK and must be freed with the matching
 * *_free function. char** outputs are owned by the caller and freed with
 * trailgen_string_free.
 */
#ifndef TRAILGEN_H
#define TRAILGEN_H

#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum {
    TRAILGEN_OK = 0,
    TRAILGEN_ERR_CONFIG = 1,   /* usage / configuration */
    TRAILGEN_ERR_DATA = 2,     /* malformed or inconsistent data */
    TRAILGEN_ERR_UPSTREAM = 3, /* model endpoint / replay store failure */
} trailgen_status;

const char* trailgen_version(void);
const char* trailgen_status_name(int status);

/* Message for the last failing call on this thread ("" if none). */
const char* trailgen_last_error(void);

void trailgen_string_free(char* s);

/* ---- configuration ---- */

typedef struct trailgen_config trailgen_config;

int trailgen_config_default(trailgen_config** out);
int trailgen_config_load(const char* path, trailgen_config** out);

/* Sets a dotted-path key, e.g. ("filter.t_min", "8") or
 * ("expand.strategy", "random_frontier"). Values are parsed as JSON when
 * possible, otherwise taken as bare strings. */
int trailgen_config_override(trailgen_config* cfg, const char* dotted_key, const char* value);

/* Canonical JSON form of the config. */
int trailgen_config_dump(const trailgen_config* cfg, char** out_json);

void trailgen_config_free(trailgen_config* cfg);

/* ---- knowledge graph ---- */

typedef struct trailgen_graph trailgen_graph;

int trailgen_graph_generate(const trailgen_config* cfg, trailgen_graph** out);
int trailgen_graph_load(const char* path, trailgen_graph** out);
int trailgen_graph_save(const trailgen_graph* graph, const char* path);
int trailgen_graph_counts(const trailgen_graph* graph, uint64_t* nodes, uint64_t* edges);
void trailgen_graph_free(trailgen_graph* graph);

/* ---- pipeline stages ----
 * Each stage reads/writes the line-delimited artifact files and returns a
 * JSON summary through out_summary (optional, may be NULL).
 */

int trailgen_synth(const trailgen_config* cfg, const trailgen_graph* graph,
                   const char* out_tasks, char** out_summary);

int trailgen_rollout(const trailgen_config* cfg, const trailgen_graph* graph,
                     const char* tasks_file, const char* out_trajectories, char** out_summary);

int trailgen_filter(const trailgen_config* cfg, const char* tasks_file,
                    const char* trajectories_file, const char* out_dataset,
                    const char* out_provenance, int lenient, char** out_summary);

/* refs_json: optional JSON array of {"name": ..., "mean": ...} reference rows
 * added to the comparison table (NULL for none). */
int trailgen_stats(const trailgen_config* cfg, const char* dataset_file, const char* name,
                   const char* refs_json, const char* out_json, const char* out_csv,
                   const char* out_svg, char** out_summary);

int trailgen_export(const trailgen_config* cfg, const char* dataset_file, const char* out_sft,
                    char** out_summary);

int trailgen_eval(const trailgen_config* cfg, const trailgen_graph* graph,
                  const char* tasks_file, const char* out_json, const char* out_csv,
                  char** out_summary);

#ifdef __cplusplus
}
#endif

#endif /* TRAILGEN_H */
