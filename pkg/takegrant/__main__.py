from takegrant.cli import main

main()
