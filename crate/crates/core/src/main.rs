use std::fs;
use std::net::SocketAddr;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde_json::json;

use conceptscope::config::Config;
use conceptscope::matcher::{
    load_similarity_taxonomy, EntityLookup, HttpLookup, LookupCache, SimilarityTaxonomy,
};
use conceptscope::ontology::OntologyStore;
use conceptscope::workspace::{InputDocument, Pipeline, Workspace};
use conceptscope::{Error, Result};

#[derive(Parser)]
#[command(
    name = "conceptscope",
    version,
    about = "Detect ontology concepts in documents and lay them out as Bubble Treemaps"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Process documents into a workspace directory.
    Process {
        /// Plain-text UTF-8 documents.
        #[arg(required = true)]
        docs: Vec<PathBuf>,
        /// Ontology triples as CSV (subject, predicate, object).
        #[arg(long)]
        ontology: PathBuf,
        /// Similarity taxonomy as `child<TAB>parent` lines; bundled one if omitted.
        #[arg(long)]
        taxonomy: Option<PathBuf>,
        /// Entity lookup cache (JSON). Created when live lookup is on.
        #[arg(long)]
        cache: Option<PathBuf>,
        /// Minimum Wu-Palmer similarity for fuzzy matches.
        #[arg(long)]
        threshold: Option<f64>,
        /// Exact matches only.
        #[arg(long)]
        no_fuzzy: bool,
        /// Settings file of `key = value` lines.
        #[arg(long)]
        config: Option<PathBuf>,
        /// Query the lookup service on cache misses.
        #[arg(long)]
        live_lookup: bool,
        /// Lookup service endpoint.
        #[arg(long)]
        endpoint: Option<String>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Serve a processed workspace over HTTP.
    Serve {
        #[arg(long)]
        workspace: PathBuf,
        #[arg(long, default_value = "127.0.0.1:8080")]
        bind: SocketAddr,
    },
}

struct ProcessArgs {
    docs: Vec<PathBuf>,
    ontology: PathBuf,
    taxonomy: Option<PathBuf>,
    cache: Option<PathBuf>,
    config: Config,
    live_lookup: bool,
    out: PathBuf,
}

fn read(path: &Path) -> Result<Vec<u8>> {
    fs::read(path).map_err(|e| Error::Io {
        path: path.to_owned(),
        source: e,
    })
}

fn process(args: ProcessArgs) -> Result<()> {
    let ontology_csv = read(&args.ontology)?;
    let store = OntologyStore::from_csv(ontology_csv.as_slice())?;
    let taxonomy = match &args.taxonomy {
        Some(p) => load_similarity_taxonomy(&String::from_utf8_lossy(&read(p)?))?,
        None => SimilarityTaxonomy::bundled().clone(),
    };
    let cache = match &args.cache {
        Some(p) => LookupCache::open(p)?,
        None => LookupCache::in_memory(),
    };
    let lookup = if args.live_lookup {
        let service = HttpLookup::new(args.config.matcher.service_endpoint.clone());
        EntityLookup::with_service(cache, Box::new(service))
    } else {
        EntityLookup::offline(cache)
    };
    let inputs = args
        .docs
        .iter()
        .map(|p| InputDocument::read(p))
        .collect::<Result<Vec<_>>>()?;
    let pipeline = Pipeline {
        store: &store,
        taxonomy: &taxonomy,
        lookup: &lookup,
        config: &args.config,
    };
    let result = pipeline.run(&inputs, ontology_csv);
    if args.live_lookup && lookup.cache().path().is_some() {
        lookup.cache().save()?;
    }
    let workspace = result?;
    workspace.save(&args.out)?;
    for d in &workspace.documents {
        println!(
            "{}\t{}\t{} concepts",
            d.stem,
            d.document.id,
            d.concepts.concept_count()
        );
    }
    Ok(())
}

fn serve(dir: &Path, bind: SocketAddr) -> Result<()> {
    let workspace = Workspace::load(dir)?;
    let runtime = tokio::runtime::Runtime::new().map_err(|e| Error::Io {
        path: dir.to_owned(),
        source: e,
    })?;
    runtime.block_on(conceptscope::server::serve(workspace, bind))
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Process {
            docs,
            ontology,
            taxonomy,
            cache,
            threshold,
            no_fuzzy,
            config,
            live_lookup,
            endpoint,
            out,
        } => {
            let mut cfg = match &config {
                Some(p) => Config::load(p)?,
                None => Config::default(),
            };
            if let Some(t) = threshold {
                cfg.matcher.threshold = t;
            }
            if no_fuzzy {
                cfg.matcher.fuzzy_enabled = false;
            }
            if let Some(e) = endpoint {
                cfg.matcher.service_endpoint = e;
            }
            cfg.matcher.cache_path = cache.clone();
            cfg.validate()?;
            process(ProcessArgs {
                docs,
                ontology,
                taxonomy,
                cache,
                config: cfg,
                live_lookup,
                out,
            })
        }
        Command::Serve { workspace, bind } => serve(&workspace, bind),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let report = json!({ "error": { "kind": e.kind(), "message": e.to_string() } });
            eprintln!("{report}");
            ExitCode::FAILURE
        }
    }
}
