from drgame.cli import main

main()
