// Placeholder entry point; the subcommand front end lands with the io module.
int main() { return 2; }
