fn main() {
    std::process::exit(rod_asymptotics::cli::run(std::env::args_os()));
}
